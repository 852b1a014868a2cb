#ifndef SYL_BUBBLE_HPP
#define SYL_BUBBLE_HPP

#include <stdexcept>
#include <utility>
#include <vector>

// Ground-state bubbles of the limit equation
//
//   D psi + lambda g3 psi = |psi|^{p-2} psi   on R^2
//
// within the equivariant ansatz psi = (v(r) e^{iS theta}, i u(r) e^{i(S+1) theta}).
// Substituting the ansatz gives the radial system
//
//   u' = -(S+1) u / r - (f(rho) - lambda) v
//   v' =      S  v / r + (f(rho) + lambda) u,     rho = sqrt(u^2 + v^2),
//
// solved here by nodal shooting in v(0). The phase plane has a constant
// solution (0, lambda^{1/(p-2)}) which is an attracting spiral for the radial
// flow; trajectories started below it get captured, and the decaying bubble is
// the separatrix with v(0) above the constant and u <= 0 throughout. Shots are
// classified by which sign flip happens first:
//   - v crosses zero        -> overshoot       (V_CROSSES_ZERO)
//   - u flips sign          -> spiral capture  (U_DOMINATES)
// and the ground state is bisected between the two regimes.

namespace syl {

struct NoBracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotConvergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TailUnderflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BubbleParams {
  double lambda = 1.0;  // mass term coefficient, > 0
  double p = 3.0;       // nonlinearity exponent, in (2, 4)
  int S = 0;            // winding number, >= 0
  double r_max = 0.0;   // truncation radius; <= 0 selects 30 / lambda
  double tol_shoot = 1e-6;
  double tol_ode = 1e-12;
  int max_bisect = 200;

  void validate() const;
  double effective_r_max() const { return r_max > 0.0 ? r_max : 30.0 / lambda; }
  // lambda^{1/(p-2)}, the amplitude of the constant solution
  double amplitude_scale() const;
};

struct RadialProfile {
  std::vector<double> r;  // uniform, starting at 0
  std::vector<double> u;
  std::vector<double> v;
  BubbleParams params;
};

struct Moments {
  double I_p0 = 0.0;  // int rho^p r dr
  double I_p2 = 0.0;  // int rho^p r^3 dr
};

struct BubbleReport {
  double v0_star = 0.0;
  double mu0 = 0.0;
  double decay_rate = 0.0;
  double residual_2d = 0.0;
  Moments moments;
};

enum class ShotClass { DECAYS, V_CROSSES_ZERO, U_DOMINATES };

struct Trajectory {
  std::vector<double> r, u, v;
  ShotClass cls = ShotClass::DECAYS;
  bool integration_failed = false;
};

// Right-hand side of the radial system; rejects r <= 0 (the origin is handled
// by the series start in shoot()).
std::pair<double, double> radial_rhs(double r, double u, double v, const BubbleParams& params);

Trajectory shoot(double v0, const BubbleParams& params);

struct GroundState {
  RadialProfile profile;
  BubbleReport report;
};

// Scan + bisection for the zero-node ground state. Throws NoBracketError when
// the scan never changes classification and NotConvergedError when the
// bisection budget is exhausted.
GroundState find_ground_state(const BubbleParams& params);

// Critical-point energy 2*pi*(1/2 - 1/p) * int rho^p r dr (tail-corrected).
double energy(const RadialProfile& profile);

// The action evaluated from its definition (kinetic + mass - potential) with
// radial derivatives taken by finite differences; agrees with energy() only
// when the profile actually solves the system.
double energy_from_definition(const RadialProfile& profile);

// Relative L2 residual of the reconstructed 2D spinor on a polar grid, with D
// applied through clifford_mul and analytic angular derivatives. For the zero
// profile sets *zero_profile and returns 0.
double full_residual(const RadialProfile& profile, bool* zero_profile = nullptr);

// Least-squares decay rate of log rho on the tail third of the grid (> 0 for
// decaying profiles). Throws TailUnderflowError if the tail vanishes.
double decay_fit(const RadialProfile& profile);

Moments moment_integrals(const RadialProfile& profile);

// profile -> lambda^{1/(p-2)} profile(lambda r) mapping (p = 3 Yamabe case
// sends the lambda = 1 ground state to the lambda one)
RadialProfile scale_profile(const RadialProfile& unit_profile, double lambda);

// Cubic-Hermite evaluation of a profile at arbitrary radius, with node slopes
// from the radial system itself and an exponential tail beyond the grid.
class ProfileInterp {
 public:
  explicit ProfileInterp(const RadialProfile& profile);

  struct Value {
    double u, v, du, dv;
  };
  Value eval(double r) const;
  double r_end() const { return r_end_; }
  double tail_rate() const { return tail_rate_; }

 private:
  const RadialProfile& prof_;
  double h_;
  double r_end_;
  double tail_rate_ = 0.0;
  std::vector<double> du_, dv_;  // node slopes
};

}  // namespace syl

#endif

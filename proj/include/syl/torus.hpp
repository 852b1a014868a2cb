#ifndef SYL_TORUS_HPP
#define SYL_TORUS_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "syl/bubble.hpp"
#include "syl/c2.hpp"
#include "syl/clifford.hpp"

// Strongly indefinite solver for
//
//   eps D psi + a g3 psi = |psi|^{p-2} psi    on the flat torus [0,L1) x [0,L2)
//
// by the spectral reduction scheme: A_eps = eps D + a g3 is diagonal per
// Fourier mode with eigenvalues +-mu(k), mu(k) = sqrt(eps^2|k|^2 + a^2). The
// energy L_eps(psi) = 1/2(||psi+||^2 - ||psi-||^2) - eps^{-2} int F(|psi|) is
// maximized over E- for fixed u in E+ (the map chi), the reduced functional
// I(u) = L(u + chi(u)) is rescaled onto the Nehari set along each ray, and a
// projected gradient flow on E+ descends to the min-max level mu_eps.

namespace syl {

struct SolverNotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SaddleEscapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoSignChangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TorusGrid {
  int N1 = 64, N2 = 64;        // mode counts, even, >= 16
  double L1 = 2.0 * M_PI, L2 = 2.0 * M_PI;
  double delta1 = 0.0, delta2 = 0.0;  // spin-structure offsets, each 0 or 1/2

  void validate() const;
  bool operator==(const TorusGrid&) const = default;
};

enum class SpinorRep { FOURIER, PHYSICAL };

// C^2-valued field on the grid; in FOURIER rep data holds true coefficients
// c_k of psi(x) = sum_k c_k e^{i k.x}, k = 2 pi (j + delta) / L.
struct FourierSpinor {
  TorusGrid grid;
  SpinorRep rep = SpinorRep::FOURIER;
  std::vector<cplx> data;  // 2 entries per site/mode: data[2*(i1*N2+i2) + comp]

  static FourierSpinor zero(const TorusGrid& g, SpinorRep rep = SpinorRep::FOURIER);
  size_t sites() const { return static_cast<size_t>(grid.N1) * grid.N2; }
};

struct SolverConfig {
  TorusGrid grid;
  double eps = 0.1;
  double a = 1.0;
  double p = 3.0;
  double tol_inner = 1e-10;
  double tol_outer = 1e-8;
  int max_inner = 600;
  int max_outer = 20000;
  enum class Seed { BUBBLE_TRANSPLANT, RANDOM };
  Seed seed_mode = Seed::BUBBLE_TRANSPLANT;
  std::uint64_t seed_value = 0;
  std::array<double, 2> seed_center{-1.0, -1.0};  // < 0 selects the domain center
  bool dealias = false;  // optional 2/3-rule mode truncation

  void validate() const;
};

struct LocalizationReport {
  std::array<double, 2> peak{};       // physical coordinates of max |psi|
  std::array<int, 2> peak_index{};
  bool peak_tie = false;
  double width = 0.0;     // largest torus distance of a >= half-max point
  double decay_c = 0.0;   // slope of -log|psi| against dist/eps (mid-range fit)
  double decay_r2 = 0.0;
};

struct SolveResult {
  FourierSpinor psi;  // Fourier rep
  double mu_eps = 0.0;
  double grad_norm = 0.0;
  std::vector<double> t_star;  // Nehari parameter history
  LocalizationReport loc;
  bool converged = false;
  int iterations = 0;
};

struct SweepRow {
  double eps = 0.0, mu_eps = 0.0, width = 0.0, decay_c = 0.0, grad_norm = 0.0;
  bool converged = false;
};

class TorusSolver {
 public:
  explicit TorusSolver(const SolverConfig& config);
  ~TorusSolver();
  TorusSolver(const TorusSolver&) = delete;
  TorusSolver& operator=(const TorusSolver&) = delete;

  const SolverConfig& config() const { return cfg_; }
  // per-mode symbols of A_eps (FFT ordering, index i1*N2+i2)
  const std::vector<ModeSymbol>& mode_table() const { return symbols_; }

  FourierSpinor to_physical(const FourierSpinor& c) const;
  FourierSpinor to_fourier(const FourierSpinor& ph) const;

  FourierSpinor project_plus(const FourierSpinor& c) const;
  FourierSpinor project_minus(const FourierSpinor& c) const;

  double inner_eps(const FourierSpinor& x, const FourierSpinor& y) const;
  double norm_eps(const FourierSpinor& x) const;

  // eps^{-2} int F(|psi|) dx, F(s) = s^p / p
  double nonlinear_integral(const FourierSpinor& c) const;
  double energy_L(const FourierSpinor& c) const;
  // gradient of L in the eps inner product (|A|^{-1} preconditioning built in)
  FourierSpinor grad_L(const FourierSpinor& c) const;

  struct ChiResult {
    FourierSpinor w;
    double grad_norm = 0.0;
    int iterations = 0;
  };
  // unique maximizer of w -> L(u + w) over E-; warm start optional
  ChiResult inner_maximize(const FourierSpinor& u, const FourierSpinor* warm = nullptr) const;

  double reduced_I(const FourierSpinor& u, const FourierSpinor* warm = nullptr) const;

  // derivative t -> d/dt I(t u) = <grad L(t u + chi(t u)), u>, for scans
  double line_derivative(double t, const FourierSpinor& u, FourierSpinor* warm = nullptr) const;
  // unique positive maximum of t -> I(t u); throws NoSignChangeError for
  // degenerate u
  double line_max_t(const FourierSpinor& u, FourierSpinor* warm = nullptr,
                    double t_init = 1.0) const;

  FourierSpinor make_seed() const;
  // transplant of a radial profile (cutoff at L/8..L/4) centered at x0
  FourierSpinor transplant(const RadialProfile& profile, std::array<double, 2> x0) const;

  SolveResult minimize_nehari() const;
  SolveResult minimize_nehari(const FourierSpinor& seed_plus) const;

  LocalizationReport localization_report(const FourierSpinor& psi) const;

  // |mu - eps^{-2} int (1/2 f |psi|^2 - F)| / |mu|
  double energy_identity_residual(const FourierSpinor& psi, double mu) const;

  // Fourier-exact evaluation of psi at x0 + factor * (x - x0) (used to warm
  // start the next ray of an eps sweep)
  FourierSpinor rescale_about(const FourierSpinor& c, std::array<double, 2> x0,
                              double factor) const;

 private:
  SolverConfig cfg_;
  std::vector<ModeSymbol> symbols_;
  std::vector<double> mu_;
  std::vector<bool> keep_;  // dealias mask
  struct Fft;
  std::unique_ptr<Fft> fft_;

  RadialProfile bubble_profile() const;
};

std::vector<ModeSymbol> assemble(const TorusGrid& grid, double eps, double a);

// runs minimize_nehari per eps (decreasing), warm-starting each ray from the
// previous solution contracted about its peak; failures are recorded per row
std::vector<SweepRow> sweep_eps(const SolverConfig& base, const std::vector<double>& eps_list);

}  // namespace syl

#endif

#ifndef SYL_GEOMETRY_HPP
#define SYL_GEOMETRY_HPP

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "syl/bubble.hpp"
#include "syl/c2.hpp"

// Curvature tensors, geodesics and normal-coordinate expansions on
// parametrized closed surfaces, plus the concentration functional Theta.
//
// Conventions (fixed throughout):
//   R(X,Y,W,Z) = g(nab_X nab_Y W, Z) - g(nab_Y nab_X W, Z) - g(nab_[X,Y] W, Z)
//   K = R(e1, e2, e2, e1) in an orthonormal frame  (> 0 on the round sphere)
//   frame at a point: Gram-Schmidt on (d_s, d_t), in that order.

namespace syl {

struct SingularMetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ChartDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientDecayError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChartPoint {
  double s = 0.0;
  double t = 0.0;
};

struct Sym2 {
  double a11 = 0.0, a12 = 0.0, a22 = 0.0;
  double det() const { return a11 * a22 - a12 * a12; }
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};
inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// first and second derivatives of an embedding (s,t) -> R^3
struct EmbeddingJet {
  Vec3 X, Xs, Xt, Xss, Xst, Xtt;
};

enum class ChartKind { EMBEDDED, METRIC };

class Chart {
 public:
  virtual ~Chart() = default;

  virtual ChartKind kind() const = 0;
  virtual std::string name() const = 0;

  virtual Sym2 metric(ChartPoint q) const = 0;
  // d_s g, d_t g ; default: 4th-order central differences of metric()
  virtual std::array<Sym2, 2> metric_d(ChartPoint q) const;
  // d_ss g, d_st g, d_tt g ; default: 4th-order central differences of metric_d()
  virtual std::array<Sym2, 3> metric_dd(ChartPoint q) const;

  virtual bool has_embedding() const { return false; }
  virtual EmbeddingJet embedding(ChartPoint) const {
    throw ChartDomainError("chart has no embedding");
  }

  // parameter rectangle [smin, smax] x [tmin, tmax] and periodicity per axis
  virtual std::array<double, 2> s_range() const = 0;
  virtual std::array<double, 2> t_range() const = 0;
  virtual bool periodic_s() const = 0;
  virtual bool periodic_t() const = 0;
  // inset from non-periodic boundaries where the chart is trustworthy
  virtual double boundary_margin() const { return 1e-3; }
  // radius around a point within which normal coordinates are used
  virtual double safe_radius(ChartPoint q) const;

  double fd_step() const { return fd_step_; }

 protected:
  double fd_step_ = 1e-4;
};

std::unique_ptr<Chart> make_sphere(double radius);
std::unique_ptr<Chart> make_ellipsoid(double a, double b, double c);
std::unique_ptr<Chart> make_torus_rev(double R0, double r);
std::unique_ptr<Chart> make_flat_torus(double L1, double L2);
// metric given as a callback; all derivatives by 4th-order finite differences
std::unique_ptr<Chart> make_metric_chart(std::function<Sym2(double, double)> g, double s0,
                                         double s1, double t0, double t1, bool per_s, bool per_t,
                                         std::string name = "metric", double fd_step = 1e-4);
// metric sampled on a rectilinear grid (Lagrange interpolation between nodes)
std::unique_ptr<Chart> make_table_chart(std::vector<double> s_nodes, std::vector<double> t_nodes,
                                        std::vector<Sym2> g_nodes, bool per_s, bool per_t);

struct CurvatureData {
  ChartPoint point;
  Sym2 g;
  double christoffel[2][2][2] = {};  // Gamma^k_{ij} indexed [k][i][j]
  double riemann[2][2][2][2] = {};   // R_{ijkl}, coordinate components, all indices down
  double frame[2][2] = {};           // e_i = frame[i][a] d_a
  double gauss = 0.0;                // K
  double scal = 0.0;                 // 2K on surfaces

  // orthonormal-frame components R(e_i, e_j, e_k, e_l), by contraction of the
  // coordinate tensor (not reconstructed from K)
  double riemann_frame(int i, int j, int k, int l) const;
  // R(e_i, x, x, e_j) for a frame vector x
  double riemann_x(int i, const std::array<double, 2>& x, int j) const;
  // Ric(x, x) = sum_j R(e_j, x, x, e_j)
  double ricci(const std::array<double, 2>& x) const;
};

CurvatureData curvature_at(const Chart& chart, ChartPoint q);

// independent oracle for EMBEDDED charts: K = (LN - M^2) / (EG - F^2)
double gauss_from_embedding(const Chart& chart, ChartPoint q);

struct GeodesicResult {
  ChartPoint q;                       // endpoint (coordinates left unwrapped)
  std::array<double, 2> velocity{};   // coordinate velocity at the endpoint
  double speed_drift = 0.0;           // relative drift of |q'|_g along the way
  int steps = 0;
};

// exp_y(x1 e1 + x2 e2) by fixed-step RK4 on the geodesic equation. The step
// count is doubled until the speed drift is below drift_tol.
GeodesicResult exp_map(const Chart& chart, ChartPoint y, const std::array<double, 2>& x,
                       double drift_tol = 1e-10);

// pulled-back metric g_ij(exp_y x) in normal coordinates (Richardson-
// extrapolated central-difference Jacobians through exp_map)
Sym2 normal_metric(const Chart& chart, ChartPoint y, const std::array<double, 2>& x);

struct ExpansionCheck {
  double fitted_order = 0.0;    // remainder order of g_ij - (delta - R/3), expect >= 3
  double coeff_rel_err = 0.0;   // quadratic coefficient vs -(1/3) R(e_i,x,x,e_j)
  double det_fitted_order = 0.0;
  double det_coeff_rel_err = 0.0;  // sqrt(det g) coefficient vs -(1/6) Ric
};

ExpansionCheck metric_expansion_check(const Chart& chart, ChartPoint y,
                                      std::span<const double> radii);

enum class ThetaMethod { FULL_GRID, ANSATZ_CLOSED_FORM };

struct ThetaReport {
  ChartPoint point;
  double K = 0.0;
  double theta = 0.0;
  double term_ricci = 0.0;
  double term_riemann = 0.0;
  ThetaMethod method = ThetaMethod::ANSATZ_CLOSED_FORM;
};

// closed form pi K (p-2)/(6p) * int rho^p r^3 dr  (p = 3: pi K / 18); the
// Riemann term is zero by definition of this method
ThetaReport theta_ansatz(double K, const RadialProfile& profile);

// a C^2-valued field on a uniform Cartesian grid over [-H, H]^2 together with
// its flat derivatives and the nonlinearity exponent
struct SampledSpinor {
  int n = 0;        // nodes per axis
  double H = 0.0;   // half-width
  double p = 3.0;
  std::vector<Vec2c> psi, d1, d2;  // row-major, index i * n + j for x = (x1_i, x2_j)
  double h() const { return 2.0 * H / (n - 1); }
};

SampledSpinor sample_ansatz(const RadialProfile& profile, double H, int n);

// both Theta terms by 2D quadrature; requires |psi| <= 1e-10 * max at the grid
// boundary
ThetaReport theta_full(const CurvatureData& curv, const SampledSpinor& field);

struct ArgmaxResult {
  ChartPoint point;
  ThetaReport report;
  bool tie_flag = false;
  std::vector<ChartPoint> ties;  // grid points within tolerance of the max
};

// grid scan of the Gaussian curvature followed by Nelder-Mead refinement;
// Theta is evaluated at the maximizer through theta_ansatz
ArgmaxResult argmax_theta(const Chart& chart, const RadialProfile& profile, int grid_n = 96);

struct VolumeExpansionRow {
  double eps = 0.0;
  double D_eps = 0.0;   // [int F - eps^{-2} int F(psi(x/eps)) sqrt(det g)] / eps^2
  double limit = 0.0;   // (1/6) int Ric(x,x) F(|psi|) dx
  double rel_err = 0.0;
};

std::vector<VolumeExpansionRow> volume_expansion_test(const Chart& chart, ChartPoint y,
                                                      const RadialProfile& profile,
                                                      std::span<const double> eps_list);

}  // namespace syl

#endif

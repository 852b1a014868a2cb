#include "syl/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "syl/clifford.hpp"
#include "syl/util.hpp"

namespace syl {

namespace {

struct Frame {
  double e[2][2];  // e_i = e[i][a] d_a ; Gram-Schmidt on (d_s, d_t)
};

Frame frame_of(const Sym2& g) {
  Frame f{};
  const double n1 = std::sqrt(g.a11);
  f.e[0][0] = 1.0 / n1;
  f.e[0][1] = 0.0;
  const double w = g.a22 - g.a12 * g.a12 / g.a11;
  const double n2 = std::sqrt(w);
  f.e[1][0] = -g.a12 / (g.a11 * n2);
  f.e[1][1] = 1.0 / n2;
  return f;
}

void check_spd(const Sym2& g) {
  const double tr = g.a11 + g.a22;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - g.det()));
  const double lo = tr / 2.0 - disc;
  if (!(lo > 1e-10)) throw SingularMetricError("metric not positive definite at sample point");
}

double sym_at(const Sym2& m, int i, int j) {
  if (i == 0 && j == 0) return m.a11;
  if (i == 1 && j == 1) return m.a22;
  return m.a12;
}

}  // namespace

// ---------------------------------------------------------------------------
// Chart base: finite-difference fallbacks (4th-order central stencils)

std::array<Sym2, 2> Chart::metric_d(ChartPoint q) const {
  const double h = fd_step_;
  auto d = [&](int axis) {
    auto at = [&](double off) {
      ChartPoint p = q;
      (axis == 0 ? p.s : p.t) += off;
      return metric(p);
    };
    const Sym2 m2 = at(-2 * h), m1 = at(-h), p1 = at(h), p2 = at(2 * h);
    Sym2 r;
    r.a11 = (m2.a11 - 8 * m1.a11 + 8 * p1.a11 - p2.a11) / (12 * h);
    r.a12 = (m2.a12 - 8 * m1.a12 + 8 * p1.a12 - p2.a12) / (12 * h);
    r.a22 = (m2.a22 - 8 * m1.a22 + 8 * p1.a22 - p2.a22) / (12 * h);
    return r;
  };
  return {d(0), d(1)};
}

std::array<Sym2, 3> Chart::metric_dd(ChartPoint q) const {
  const double h = fd_step_;
  auto dd = [&](int axis, int comp) {
    auto at = [&](double off) {
      ChartPoint p = q;
      (axis == 0 ? p.s : p.t) += off;
      return metric_d(p)[comp];
    };
    const Sym2 m2 = at(-2 * h), m1 = at(-h), p1 = at(h), p2 = at(2 * h);
    Sym2 r;
    r.a11 = (m2.a11 - 8 * m1.a11 + 8 * p1.a11 - p2.a11) / (12 * h);
    r.a12 = (m2.a12 - 8 * m1.a12 + 8 * p1.a12 - p2.a12) / (12 * h);
    r.a22 = (m2.a22 - 8 * m1.a22 + 8 * p1.a22 - p2.a22) / (12 * h);
    return r;
  };
  return {dd(0, 0), dd(1, 0), dd(1, 1)};  // ss, st, tt
}

double Chart::safe_radius(ChartPoint q) const {
  const Sym2 g = metric(q);
  const auto sr = s_range(), tr = t_range();
  double ds = (sr[1] - sr[0]);
  double dt = (tr[1] - tr[0]);
  if (!periodic_s())
    ds = std::min(q.s - sr[0], sr[1] - q.s);
  else
    ds *= 0.5;
  if (!periodic_t())
    dt = std::min(q.t - tr[0], tr[1] - q.t);
  else
    dt *= 0.5;
  return 0.8 * std::min(ds * std::sqrt(g.a11), dt * std::sqrt(g.a22));
}

// ---------------------------------------------------------------------------
// Built-in charts

namespace {

class SphereChart final : public Chart {
 public:
  explicit SphereChart(double R) : R_(R) {
    if (!(R > 0.0)) throw std::invalid_argument("sphere: radius must be > 0");
  }
  ChartKind kind() const override { return ChartKind::EMBEDDED; }
  std::string name() const override { return "sphere"; }
  Sym2 metric(ChartPoint q) const override {
    const double s = std::sin(q.s);
    return {R_ * R_, 0.0, R_ * R_ * s * s};
  }
  std::array<Sym2, 2> metric_d(ChartPoint q) const override {
    return {Sym2{0.0, 0.0, R_ * R_ * std::sin(2.0 * q.s)}, Sym2{}};
  }
  std::array<Sym2, 3> metric_dd(ChartPoint q) const override {
    return {Sym2{0.0, 0.0, 2.0 * R_ * R_ * std::cos(2.0 * q.s)}, Sym2{}, Sym2{}};
  }
  bool has_embedding() const override { return true; }
  EmbeddingJet embedding(ChartPoint q) const override {
    const double cs = std::cos(q.s), ss = std::sin(q.s);
    const double ct = std::cos(q.t), st = std::sin(q.t);
    EmbeddingJet j;
    j.X = R_ * Vec3{ss * ct, ss * st, cs};
    j.Xs = R_ * Vec3{cs * ct, cs * st, -ss};
    j.Xt = R_ * Vec3{-ss * st, ss * ct, 0.0};
    j.Xss = R_ * Vec3{-ss * ct, -ss * st, -cs};
    j.Xst = R_ * Vec3{-cs * st, cs * ct, 0.0};
    j.Xtt = R_ * Vec3{-ss * ct, -ss * st, 0.0};
    return j;
  }
  std::array<double, 2> s_range() const override { return {0.0, M_PI}; }
  std::array<double, 2> t_range() const override { return {0.0, 2.0 * M_PI}; }
  bool periodic_s() const override { return false; }
  bool periodic_t() const override { return true; }
  double boundary_margin() const override { return 0.02; }
  double safe_radius(ChartPoint q) const override {
    return 0.9 * R_ * std::min({q.s, M_PI - q.s, 0.8 * M_PI});
  }

 private:
  double R_;
};

class EllipsoidChart final : public Chart {
 public:
  EllipsoidChart(double a, double b, double c) : a_(a), b_(b), c_(c) {
    if (!(a > 0 && b > 0 && c > 0)) throw std::invalid_argument("ellipsoid: axes must be > 0");
  }
  ChartKind kind() const override { return ChartKind::EMBEDDED; }
  std::string name() const override { return "ellipsoid"; }
  Sym2 metric(ChartPoint q) const override {
    const EmbeddingJet j = embedding(q);
    return {dot(j.Xs, j.Xs), dot(j.Xs, j.Xt), dot(j.Xt, j.Xt)};
  }
  std::array<Sym2, 2> metric_d(ChartPoint q) const override {
    const EmbeddingJet j = embedding(q);
    Sym2 ds{2.0 * dot(j.Xss, j.Xs), dot(j.Xss, j.Xt) + dot(j.Xs, j.Xst), 2.0 * dot(j.Xst, j.Xt)};
    Sym2 dt{2.0 * dot(j.Xst, j.Xs), dot(j.Xst, j.Xt) + dot(j.Xs, j.Xtt), 2.0 * dot(j.Xtt, j.Xt)};
    return {ds, dt};
  }
  bool has_embedding() const override { return true; }
  EmbeddingJet embedding(ChartPoint q) const override {
    const double cs = std::cos(q.s), ss = std::sin(q.s);
    const double ct = std::cos(q.t), st = std::sin(q.t);
    EmbeddingJet j;
    j.X = {a_ * ss * ct, b_ * ss * st, c_ * cs};
    j.Xs = {a_ * cs * ct, b_ * cs * st, -c_ * ss};
    j.Xt = {-a_ * ss * st, b_ * ss * ct, 0.0};
    j.Xss = {-a_ * ss * ct, -b_ * ss * st, -c_ * cs};
    j.Xst = {-a_ * cs * st, b_ * cs * ct, 0.0};
    j.Xtt = {-a_ * ss * ct, -b_ * ss * st, 0.0};
    return j;
  }
  std::array<double, 2> s_range() const override { return {0.0, M_PI}; }
  std::array<double, 2> t_range() const override { return {0.0, 2.0 * M_PI}; }
  bool periodic_s() const override { return false; }
  bool periodic_t() const override { return true; }
  double boundary_margin() const override { return 0.02; }

 private:
  double a_, b_, c_;
};

class TorusRevChart final : public Chart {
 public:
  TorusRevChart(double R0, double r) : R0_(R0), r_(r) {
    if (!(r > 0 && R0 > r)) throw std::invalid_argument("torus: need R0 > r > 0");
  }
  ChartKind kind() const override { return ChartKind::EMBEDDED; }
  std::string name() const override { return "torus"; }
  // s = tube angle, t = axial angle; g = diag(r^2, (R0 + r cos s)^2)
  Sym2 metric(ChartPoint q) const override {
    const double w = R0_ + r_ * std::cos(q.s);
    return {r_ * r_, 0.0, w * w};
  }
  std::array<Sym2, 2> metric_d(ChartPoint q) const override {
    const double w = R0_ + r_ * std::cos(q.s);
    return {Sym2{0.0, 0.0, -2.0 * w * r_ * std::sin(q.s)}, Sym2{}};
  }
  std::array<Sym2, 3> metric_dd(ChartPoint q) const override {
    const double cs = std::cos(q.s), ss = std::sin(q.s);
    const double w = R0_ + r_ * cs;
    return {Sym2{0.0, 0.0, 2.0 * r_ * r_ * ss * ss - 2.0 * w * r_ * cs}, Sym2{}, Sym2{}};
  }
  bool has_embedding() const override { return true; }
  EmbeddingJet embedding(ChartPoint q) const override {
    const double cs = std::cos(q.s), ss = std::sin(q.s);
    const double ct = std::cos(q.t), st = std::sin(q.t);
    const double w = R0_ + r_ * cs;
    EmbeddingJet j;
    j.X = {w * ct, w * st, r_ * ss};
    j.Xs = {-r_ * ss * ct, -r_ * ss * st, r_ * cs};
    j.Xt = {-w * st, w * ct, 0.0};
    j.Xss = {-r_ * cs * ct, -r_ * cs * st, -r_ * ss};
    j.Xst = {r_ * ss * st, -r_ * ss * ct, 0.0};
    j.Xtt = {-w * ct, -w * st, 0.0};
    return j;
  }
  std::array<double, 2> s_range() const override { return {0.0, 2.0 * M_PI}; }
  std::array<double, 2> t_range() const override { return {0.0, 2.0 * M_PI}; }
  bool periodic_s() const override { return true; }
  bool periodic_t() const override { return true; }

 private:
  double R0_, r_;
};

class FlatTorusChart final : public Chart {
 public:
  FlatTorusChart(double L1, double L2) : L1_(L1), L2_(L2) {
    if (!(L1 > 0 && L2 > 0)) throw std::invalid_argument("flat torus: periods must be > 0");
  }
  ChartKind kind() const override { return ChartKind::METRIC; }
  std::string name() const override { return "flat"; }
  Sym2 metric(ChartPoint) const override { return {1.0, 0.0, 1.0}; }
  std::array<Sym2, 2> metric_d(ChartPoint) const override { return {Sym2{}, Sym2{}}; }
  std::array<Sym2, 3> metric_dd(ChartPoint) const override { return {Sym2{}, Sym2{}, Sym2{}}; }
  std::array<double, 2> s_range() const override { return {0.0, L1_}; }
  std::array<double, 2> t_range() const override { return {0.0, L2_}; }
  bool periodic_s() const override { return true; }
  bool periodic_t() const override { return true; }

 private:
  double L1_, L2_;
};

class FuncMetricChart final : public Chart {
 public:
  FuncMetricChart(std::function<Sym2(double, double)> g, double s0, double s1, double t0,
                  double t1, bool per_s, bool per_t, std::string name, double fd_step)
      : g_(std::move(g)), s0_(s0), s1_(s1), t0_(t0), t1_(t1), per_s_(per_s), per_t_(per_t),
        name_(std::move(name)) {
    fd_step_ = fd_step;
  }
  ChartKind kind() const override { return ChartKind::METRIC; }
  std::string name() const override { return name_; }
  Sym2 metric(ChartPoint q) const override { return g_(q.s, q.t); }
  std::array<double, 2> s_range() const override { return {s0_, s1_}; }
  std::array<double, 2> t_range() const override { return {t0_, t1_}; }
  bool periodic_s() const override { return per_s_; }
  bool periodic_t() const override { return per_t_; }
  double boundary_margin() const override { return 0.02; }

 private:
  std::function<Sym2(double, double)> g_;
  double s0_, s1_, t0_, t1_;
  bool per_s_, per_t_;
  std::string name_;
};

// metric sampled on a uniform rectilinear grid; 6-point tensor-product
// Lagrange interpolation, derivatives through the FD fallback
class TableChart final : public Chart {
 public:
  TableChart(std::vector<double> s_nodes, std::vector<double> t_nodes, std::vector<Sym2> vals,
             bool per_s, bool per_t)
      : s_(std::move(s_nodes)), t_(std::move(t_nodes)), v_(std::move(vals)), per_s_(per_s),
        per_t_(per_t) {
    if (s_.size() < 6 || t_.size() < 6)
      throw std::invalid_argument("table chart: need >= 6 nodes per axis");
    if (v_.size() != s_.size() * t_.size())
      throw std::invalid_argument("table chart: size mismatch");
    hs_ = s_[1] - s_[0];
    ht_ = t_[1] - t_[0];
    fd_step_ = 1.5 * std::min(hs_, ht_);
  }
  ChartKind kind() const override { return ChartKind::METRIC; }
  std::string name() const override { return "table"; }
  Sym2 metric(ChartPoint q) const override {
    double ws[6], wt[6];
    long is0, it0;
    weights(q.s, s_, hs_, per_s_, ws, is0);
    weights(q.t, t_, ht_, per_t_, wt, it0);
    Sym2 out{};
    const long ns = static_cast<long>(s_.size()), nt = static_cast<long>(t_.size());
    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 6; ++b) {
        long i = is0 + a, j = it0 + b;
        if (per_s_) i = ((i % ns) + ns) % ns;
        if (per_t_) j = ((j % nt) + nt) % nt;
        i = std::clamp<long>(i, 0, ns - 1);
        j = std::clamp<long>(j, 0, nt - 1);
        const Sym2& g = v_[static_cast<size_t>(i) * nt + j];
        const double w = ws[a] * wt[b];
        out.a11 += w * g.a11;
        out.a12 += w * g.a12;
        out.a22 += w * g.a22;
      }
    }
    return out;
  }
  std::array<double, 2> s_range() const override { return {s_.front(), s_.back()}; }
  std::array<double, 2> t_range() const override { return {t_.front(), t_.back()}; }
  bool periodic_s() const override { return per_s_; }
  bool periodic_t() const override { return per_t_; }
  double boundary_margin() const override { return 0.05; }

 private:
  static void weights(double x, const std::vector<double>& nodes, double h, bool periodic,
                      double w[6], long& i0) {
    const double x0 = nodes.front();
    double xr = x;
    if (periodic) {
      const double period = h * static_cast<double>(nodes.size());
      xr = x0 + std::fmod(std::fmod(x - x0, period) + period, period);
    }
    long cell = static_cast<long>(std::floor((xr - x0) / h));
    i0 = cell - 2;
    if (!periodic) i0 = std::clamp<long>(i0, 0, static_cast<long>(nodes.size()) - 6);
    double xs[6];
    for (int a = 0; a < 6; ++a) xs[a] = x0 + h * static_cast<double>(i0 + a);
    for (int a = 0; a < 6; ++a) {
      double num = 1.0, den = 1.0;
      for (int b = 0; b < 6; ++b) {
        if (a == b) continue;
        num *= (xr - xs[b]);
        den *= (xs[a] - xs[b]);
      }
      w[a] = num / den;
    }
  }

  std::vector<double> s_, t_;
  std::vector<Sym2> v_;
  bool per_s_, per_t_;
  double hs_, ht_;
};

}  // namespace

std::unique_ptr<Chart> make_sphere(double radius) { return std::make_unique<SphereChart>(radius); }
std::unique_ptr<Chart> make_ellipsoid(double a, double b, double c) {
  return std::make_unique<EllipsoidChart>(a, b, c);
}
std::unique_ptr<Chart> make_torus_rev(double R0, double r) {
  return std::make_unique<TorusRevChart>(R0, r);
}
std::unique_ptr<Chart> make_flat_torus(double L1, double L2) {
  return std::make_unique<FlatTorusChart>(L1, L2);
}
std::unique_ptr<Chart> make_metric_chart(std::function<Sym2(double, double)> g, double s0,
                                         double s1, double t0, double t1, bool per_s, bool per_t,
                                         std::string name, double fd_step) {
  return std::make_unique<FuncMetricChart>(std::move(g), s0, s1, t0, t1, per_s, per_t,
                                           std::move(name), fd_step);
}
std::unique_ptr<Chart> make_table_chart(std::vector<double> s_nodes, std::vector<double> t_nodes,
                                        std::vector<Sym2> g_nodes, bool per_s, bool per_t) {
  return std::make_unique<TableChart>(std::move(s_nodes), std::move(t_nodes), std::move(g_nodes),
                                      per_s, per_t);
}

// ---------------------------------------------------------------------------
// Curvature

double CurvatureData::riemann_frame(int i, int j, int k, int l) const {
  double s = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          s += frame[i][a] * frame[j][b] * frame[k][c] * frame[l][d] * riemann[a][b][c][d];
  return s;
}

double CurvatureData::riemann_x(int i, const std::array<double, 2>& x, int j) const {
  double s = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) s += x[a] * x[b] * riemann_frame(i, a, b, j);
  return s;
}

double CurvatureData::ricci(const std::array<double, 2>& x) const {
  return riemann_x(0, x, 0) + riemann_x(1, x, 1);
}

CurvatureData curvature_at(const Chart& chart, ChartPoint q) {
  CurvatureData cd;
  cd.point = q;
  cd.g = chart.metric(q);
  check_spd(cd.g);
  const auto dg = chart.metric_d(q);
  const auto ddg = chart.metric_dd(q);

  const double det = cd.g.det();
  const double gi[2][2] = {{cd.g.a22 / det, -cd.g.a12 / det}, {-cd.g.a12 / det, cd.g.a11 / det}};

  auto dg_at = [&](int m, int i, int j) { return sym_at(dg[m], i, j); };
  auto ddg_at = [&](int m, int n2, int i, int j) {
    const int idx = (m == 0 && n2 == 0) ? 0 : ((m == 1 && n2 == 1) ? 2 : 1);
    return sym_at(ddg[idx], i, j);
  };

  // Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int l = 0; l < 2; ++l)
          s += gi[k][l] * (dg_at(i, j, l) + dg_at(j, i, l) - dg_at(l, i, j));
        cd.christoffel[k][i][j] = 0.5 * s;
      }

  // d_m Gamma^k_ij, with d_m g^{kl} = -g^{ka} (d_m g_ab) g^{bl}
  double dGamma[2][2][2][2];  // [m][k][i][j]
  for (int m = 0; m < 2; ++m) {
    double dgi[2][2];
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) {
        double s = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) s += gi[k][a] * dg_at(m, a, b) * gi[b][l];
        dgi[k][l] = -s;
      }
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double s = 0.0;
          for (int l = 0; l < 2; ++l) {
            s += dgi[k][l] * (dg_at(i, j, l) + dg_at(j, i, l) - dg_at(l, i, j));
            s += gi[k][l] * (ddg_at(m, i, j, l) + ddg_at(m, j, i, l) - ddg_at(m, l, i, j));
          }
          dGamma[m][k][i][j] = 0.5 * s;
        }
  }

  // R(d_i, d_j, d_k, d_l) = [d_i Gamma^m_jk - d_j Gamma^m_ik
  //                          + Gamma^n_jk Gamma^m_in - Gamma^n_ik Gamma^m_jn] g_ml
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          double s = 0.0;
          for (int m = 0; m < 2; ++m) {
            double br = dGamma[i][m][j][k] - dGamma[j][m][i][k];
            for (int n2 = 0; n2 < 2; ++n2)
              br += cd.christoffel[n2][j][k] * cd.christoffel[m][i][n2] -
                    cd.christoffel[n2][i][k] * cd.christoffel[m][j][n2];
            s += br * sym_at(cd.g, m, l);
          }
          cd.riemann[i][j][k][l] = s;
        }

  const Frame f = frame_of(cd.g);
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 2; ++a) cd.frame[i][a] = f.e[i][a];

  cd.gauss = cd.riemann_frame(0, 1, 1, 0);
  cd.scal = 2.0 * cd.gauss;
  return cd;
}

double gauss_from_embedding(const Chart& chart, ChartPoint q) {
  if (!chart.has_embedding())
    throw ChartDomainError("gauss_from_embedding: chart is not embedded");
  const EmbeddingJet j = chart.embedding(q);
  const double E = dot(j.Xs, j.Xs), F = dot(j.Xs, j.Xt), G = dot(j.Xt, j.Xt);
  Vec3 n = cross(j.Xs, j.Xt);
  const double nn = std::sqrt(dot(n, n));
  n = (1.0 / nn) * n;
  const double L = dot(j.Xss, n), M = dot(j.Xst, n), N = dot(j.Xtt, n);
  return (L * N - M * M) / (E * G - F * F);
}

// ---------------------------------------------------------------------------
// Geodesics / normal coordinates

namespace {

struct GeoState {
  double q[2];
  double p[2];
};

GeoState geo_rhs(const Chart& chart, const GeoState& y) {
  const ChartPoint q{y.q[0], y.q[1]};
  const Sym2 g = chart.metric(q);
  const auto dg = chart.metric_d(q);
  const double det = g.det();
  const double gi[2][2] = {{g.a22 / det, -g.a12 / det}, {-g.a12 / det, g.a11 / det}};
  auto dg_at = [&](int m, int i, int j) { return sym_at(dg[m], i, j); };
  double Gamma[2][2][2];
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int l = 0; l < 2; ++l)
          s += gi[k][l] * (dg_at(i, j, l) + dg_at(j, i, l) - dg_at(l, i, j));
        Gamma[k][i][j] = 0.5 * s;
      }
  GeoState d;
  d.q[0] = y.p[0];
  d.q[1] = y.p[1];
  for (int k = 0; k < 2; ++k) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s += Gamma[k][i][j] * y.p[i] * y.p[j];
    d.p[k] = -s;
  }
  return d;
}

double speed_of(const Chart& chart, const GeoState& y) {
  const Sym2 g = chart.metric({y.q[0], y.q[1]});
  return std::sqrt(g.a11 * y.p[0] * y.p[0] + 2.0 * g.a12 * y.p[0] * y.p[1] +
                   g.a22 * y.p[1] * y.p[1]);
}

GeoState rk4_geodesic(const Chart& chart, const GeoState& y0, int n, double* drift,
                      const std::function<void(int, const GeoState&)>& observer = nullptr) {
  GeoState y = y0;
  const double h = 1.0 / n;
  const double v0 = speed_of(chart, y);
  double dmax = 0.0;
  for (int s = 0; s < n; ++s) {
    const GeoState k1 = geo_rhs(chart, y);
    GeoState y2{{y.q[0] + 0.5 * h * k1.q[0], y.q[1] + 0.5 * h * k1.q[1]},
                {y.p[0] + 0.5 * h * k1.p[0], y.p[1] + 0.5 * h * k1.p[1]}};
    const GeoState k2 = geo_rhs(chart, y2);
    GeoState y3{{y.q[0] + 0.5 * h * k2.q[0], y.q[1] + 0.5 * h * k2.q[1]},
                {y.p[0] + 0.5 * h * k2.p[0], y.p[1] + 0.5 * h * k2.p[1]}};
    const GeoState k3 = geo_rhs(chart, y3);
    GeoState y4{{y.q[0] + h * k3.q[0], y.q[1] + h * k3.q[1]},
                {y.p[0] + h * k3.p[0], y.p[1] + h * k3.p[1]}};
    const GeoState k4 = geo_rhs(chart, y4);
    for (int c = 0; c < 2; ++c) {
      y.q[c] += h / 6.0 * (k1.q[c] + 2 * k2.q[c] + 2 * k3.q[c] + k4.q[c]);
      y.p[c] += h / 6.0 * (k1.p[c] + 2 * k2.p[c] + 2 * k3.p[c] + k4.p[c]);
    }
    if (v0 > 0.0) dmax = std::max(dmax, std::abs(speed_of(chart, y) - v0) / v0);
    if (observer) observer(s + 1, y);
  }
  if (drift) *drift = dmax;
  return y;
}

}  // namespace

GeodesicResult exp_map(const Chart& chart, ChartPoint y, const std::array<double, 2>& x,
                       double drift_tol) {
  GeodesicResult res;
  const double xn = std::hypot(x[0], x[1]);
  if (xn == 0.0) {
    res.q = y;
    return res;
  }
  const Sym2 g = chart.metric(y);
  check_spd(g);
  const Frame f = frame_of(g);
  GeoState s0;
  s0.q[0] = y.s;
  s0.q[1] = y.t;
  s0.p[0] = x[0] * f.e[0][0] + x[1] * f.e[1][0];
  s0.p[1] = x[0] * f.e[0][1] + x[1] * f.e[1][1];

  int n = std::max(64, static_cast<int>(std::ceil(64.0 * xn)));
  for (;; n *= 2) {
    double drift;
    const GeoState end = rk4_geodesic(chart, s0, n, &drift);
    if (drift <= drift_tol || n >= (1 << 17)) {
      res.q = {end.q[0], end.q[1]};
      res.velocity = {end.p[0], end.p[1]};
      res.speed_drift = drift;
      res.steps = n;
      return res;
    }
  }
}

Sym2 normal_metric(const Chart& chart, ChartPoint y, const std::array<double, 2>& x) {
  const double xn = std::hypot(x[0], x[1]);
  const double h0 = std::max(1e-5, 1e-3 * xn);
  // all geodesics below use one fixed step count so that the integrator bias
  // cancels in the centered differences
  const int nsteps = std::max(512, static_cast<int>(std::ceil(512.0 * xn)));
  const Sym2 gy = chart.metric(y);
  check_spd(gy);
  const Frame fy = frame_of(gy);
  auto shoot_to = [&](const std::array<double, 2>& xx) {
    GeoState s0;
    s0.q[0] = y.s;
    s0.q[1] = y.t;
    s0.p[0] = xx[0] * fy.e[0][0] + xx[1] * fy.e[1][0];
    s0.p[1] = xx[0] * fy.e[0][1] + xx[1] * fy.e[1][1];
    const GeoState end = rk4_geodesic(chart, s0, nsteps, nullptr);
    return ChartPoint{end.q[0], end.q[1]};
  };
  auto jac = [&](double h) {
    double J[2][2];
    for (int i = 0; i < 2; ++i) {
      std::array<double, 2> xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const ChartPoint qp = shoot_to(xp);
      const ChartPoint qm = shoot_to(xm);
      J[0][i] = (qp.s - qm.s) / (2.0 * h);
      J[1][i] = (qp.t - qm.t) / (2.0 * h);
    }
    return std::array<double, 4>{J[0][0], J[0][1], J[1][0], J[1][1]};
  };
  const auto Jh = jac(h0);
  const auto Jh2 = jac(h0 / 2.0);
  double J[2][2];
  J[0][0] = (4.0 * Jh2[0] - Jh[0]) / 3.0;
  J[0][1] = (4.0 * Jh2[1] - Jh[1]) / 3.0;
  J[1][0] = (4.0 * Jh2[2] - Jh[2]) / 3.0;
  J[1][1] = (4.0 * Jh2[3] - Jh[3]) / 3.0;

  const Sym2 G = chart.metric(shoot_to(x));
  auto G_at = [&](int a, int b) { return sym_at(G, a, b); };
  double m[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double s = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) s += J[a][i] * G_at(a, b) * J[b][j];
      m[i][j] = s;
    }
  Sym2 out;
  out.a11 = m[0][0];
  out.a12 = 0.5 * (m[0][1] + m[1][0]);
  out.a22 = m[1][1];
  return out;
}

ExpansionCheck metric_expansion_check(const Chart& chart, ChartPoint y,
                                      std::span<const double> radii) {
  if (radii.size() < 2) throw std::invalid_argument("metric_expansion_check: need >= 2 radii");
  const CurvatureData cd = curvature_at(chart, y);
  constexpr int kDirs = 8;

  std::vector<double> rs(radii.begin(), radii.end());
  std::sort(rs.begin(), rs.end(), std::greater<>());
  const double r_a = rs[rs.size() - 2], r_b = rs[rs.size() - 1];

  std::vector<double> log_r, log_e, log_ed;
  struct CoeffSet {
    double c[2][2][kDirs];
    double cdet[kDirs];
  };
  CoeffSet c_small[2]{};

  for (double r : rs) {
    double emax = 0.0, edmax = 0.0;
    for (int d = 0; d < kDirs; ++d) {
      const double ang = 2.0 * M_PI * d / kDirs;
      const std::array<double, 2> x{r * std::cos(ang), r * std::sin(ang)};
      const Sym2 gt = normal_metric(chart, y, x);
      const double gmat[2][2] = {{gt.a11, gt.a12}, {gt.a12, gt.a22}};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double model = (i == j ? 1.0 : 0.0) - cd.riemann_x(i, x, j) / 3.0;
          emax = std::max(emax, std::abs(gmat[i][j] - model));
        }
      const double sq = std::sqrt(std::max(0.0, gt.det()));
      edmax = std::max(edmax, std::abs(sq - 1.0 + cd.ricci(x) / 6.0));
      for (int which = 0; which < 2; ++which) {
        if (r == (which == 0 ? r_a : r_b)) {
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
              c_small[which].c[i][j][d] = (gmat[i][j] - (i == j ? 1.0 : 0.0)) / (r * r);
          c_small[which].cdet[d] = (sq - 1.0) / (r * r);
        }
      }
    }
    log_r.push_back(std::log(r));
    log_e.push_back(std::log(std::max(emax, 1e-300)));
    log_ed.push_back(std::log(std::max(edmax, 1e-300)));
  }

  ExpansionCheck out;
  const double floor_e = 3e-8;
  out.fitted_order = (std::exp(log_e.front()) < floor_e && std::exp(log_e.back()) < floor_e)
                         ? 10.0
                         : linear_fit(log_r, log_e).slope;
  out.det_fitted_order = (std::exp(log_ed.front()) < floor_e && std::exp(log_ed.back()) < floor_e)
                             ? 10.0
                             : linear_fit(log_r, log_ed).slope;

  // linear-in-r extrapolation of the quadratic coefficients to r = 0
  const double scale = std::max(std::abs(cd.gauss), 1e-8);
  double worst = 0.0, worst_det = 0.0, worst_abs = 0.0, worst_det_abs = 0.0;
  bool any_rel = false, any_rel_det = false;
  for (int d = 0; d < kDirs; ++d) {
    const double ang = 2.0 * M_PI * d / kDirs;
    const std::array<double, 2> dir{std::cos(ang), std::sin(ang)};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double c_fit =
            (c_small[1].c[i][j][d] * r_a - c_small[0].c[i][j][d] * r_b) / (r_a - r_b);
        const double expected = -cd.riemann_x(i, dir, j) / 3.0;
        if (std::abs(expected) > 0.05 * scale) {
          any_rel = true;
          worst = std::max(worst, std::abs(c_fit - expected) / std::abs(expected));
        } else {
          worst_abs = std::max(worst_abs, std::abs(c_fit - expected));
        }
      }
    const double cd_fit = (c_small[1].cdet[d] * r_a - c_small[0].cdet[d] * r_b) / (r_a - r_b);
    const double expected_det = -cd.ricci(dir) / 6.0;
    if (std::abs(expected_det) > 0.05 * scale) {
      any_rel_det = true;
      worst_det = std::max(worst_det, std::abs(cd_fit - expected_det) / std::abs(expected_det));
    } else {
      worst_det_abs = std::max(worst_det_abs, std::abs(cd_fit - expected_det));
    }
  }
  out.coeff_rel_err = any_rel ? worst : worst_abs;
  out.det_coeff_rel_err = any_rel_det ? worst_det : worst_det_abs;
  return out;
}

// ---------------------------------------------------------------------------
// Theta

ThetaReport theta_ansatz(double K, const RadialProfile& profile) {
  const Moments m = moment_integrals(profile);
  const double p = profile.params.p;
  ThetaReport rep;
  rep.K = K;
  rep.method = ThetaMethod::ANSATZ_CLOSED_FORM;
  rep.term_ricci = M_PI * K * (p - 2.0) / (6.0 * p) * m.I_p2;
  rep.term_riemann = 0.0;
  rep.theta = rep.term_ricci;
  return rep;
}

SampledSpinor sample_ansatz(const RadialProfile& profile, double H, int n) {
  if (n % 2 == 0) ++n;  // odd node count keeps the origin on the grid and Simpson exact
  SampledSpinor f;
  f.n = n;
  f.H = H;
  f.p = profile.params.p;
  f.psi.resize(static_cast<size_t>(n) * n);
  f.d1.resize(f.psi.size());
  f.d2.resize(f.psi.size());
  const ProfileInterp interp(profile);
  const int S = profile.params.S;
  const double h = 2.0 * H / (n - 1);
  const cplx I{0.0, 1.0};
  for (int i = 0; i < n; ++i) {
    const double x1 = -H + i * h;
    for (int j = 0; j < n; ++j) {
      const double x2 = -H + j * h;
      const double r = std::max(std::hypot(x1, x2), 1e-9);
      const double th = std::atan2(x2, x1);
      const auto val = interp.eval(r);
      const cplx phS = std::exp(I * static_cast<double>(S) * th);
      const cplx phS1 = std::exp(I * static_cast<double>(S + 1) * th);
      const Vec2c psi{val.v * phS, I * val.u * phS1};
      const Vec2c dpsi_r{val.dv * phS, I * val.du * phS1};
      const Vec2c dpsi_th{I * static_cast<double>(S) * psi.a,
                          I * static_cast<double>(S + 1) * psi.b};
      const double c = std::cos(th), s = std::sin(th);
      const size_t idx = static_cast<size_t>(i) * n + j;
      f.psi[idx] = psi;
      f.d1[idx] = dpsi_r * c - dpsi_th * (s / r);
      f.d2[idx] = dpsi_r * s + dpsi_th * (c / r);
    }
  }
  return f;
}

ThetaReport theta_full(const CurvatureData& curv, const SampledSpinor& field) {
  const int n = field.n;
  if (n < 5 || n % 2 == 0) throw std::invalid_argument("theta_full: need odd n >= 5");
  const double h = field.h();

  double psi_max = 0.0, boundary_max = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double a = norm(field.psi[static_cast<size_t>(i) * n + j]);
      psi_max = std::max(psi_max, a);
      if (i == 0 || j == 0 || i == n - 1 || j == n - 1) boundary_max = std::max(boundary_max, a);
    }
  if (psi_max > 0.0 && boundary_max > 1e-10 * psi_max)
    throw InsufficientDecayError("theta_full: field does not decay at the grid boundary");

  auto simpson_w = [n](int i) {
    if (i == 0 || i == n - 1) return 1.0;
    return (i % 2 == 1) ? 4.0 : 2.0;
  };

  double term_ricci = 0.0, term_riemann = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x1 = -field.H + i * h;
    for (int j = 0; j < n; ++j) {
      const double x2 = -field.H + j * h;
      const double w = simpson_w(i) * simpson_w(j) * (h / 3.0) * (h / 3.0);
      const size_t idx = static_cast<size_t>(i) * n + j;
      const Vec2c psi = field.psi[idx];
      const double rho = norm(psi);
      const double frho = rho > 0.0 ? std::pow(rho, field.p - 2.0) : 0.0;
      const double F = rho > 0.0 ? std::pow(rho, field.p) / field.p : 0.0;
      const std::array<double, 2> x{x1, x2};
      term_ricci += w * curv.ricci(x) * (0.5 * frho * rho * rho - F);

      const Vec2c g1psi = clifford_mul({1.0, 0.0}, psi);
      const Vec2c g2psi = clifford_mul({0.0, 1.0}, psi);
      const double a11 = std::real(inner(field.d1[idx], g1psi));
      const double a12 = std::real(inner(field.d2[idx], g1psi));
      const double a21 = std::real(inner(field.d1[idx], g2psi));
      const double a22 = std::real(inner(field.d2[idx], g2psi));
      // sum_{ij} R(e_i, x, x, e_j) (nabla_j psi, e_i . psi)
      term_riemann += w * (curv.riemann_x(0, x, 0) * a11 + curv.riemann_x(0, x, 1) * a12 +
                           curv.riemann_x(1, x, 0) * a21 + curv.riemann_x(1, x, 1) * a22);
    }
  }
  ThetaReport out;
  out.point = curv.point;
  out.K = curv.gauss;
  out.method = ThetaMethod::FULL_GRID;
  out.term_ricci = term_ricci / 6.0;
  out.term_riemann = term_riemann / 12.0;
  out.theta = out.term_ricci + out.term_riemann;
  return out;
}

// ---------------------------------------------------------------------------
// argmax over the chart

namespace {

// minimal Nelder-Mead maximizer on 2 variables
ChartPoint nelder_mead_max(const std::function<double(ChartPoint)>& f, ChartPoint start,
                           double scale, int iters) {
  struct V {
    ChartPoint q;
    double val;
  };
  auto F = [&](ChartPoint q) { return -f(q); };
  std::array<V, 3> sx{V{start, F(start)},
                      V{{start.s + scale, start.t}, F({start.s + scale, start.t})},
                      V{{start.s, start.t + scale}, F({start.s, start.t + scale})}};
  for (int it = 0; it < iters; ++it) {
    std::sort(sx.begin(), sx.end(), [](const V& a, const V& b) { return a.val < b.val; });
    const double diam =
        std::max(std::hypot(sx[1].q.s - sx[0].q.s, sx[1].q.t - sx[0].q.t),
                 std::hypot(sx[2].q.s - sx[0].q.s, sx[2].q.t - sx[0].q.t));
    if (diam < 1e-12) break;
    const ChartPoint c{0.5 * (sx[0].q.s + sx[1].q.s), 0.5 * (sx[0].q.t + sx[1].q.t)};
    auto lerp = [&](double a) {
      return ChartPoint{c.s + a * (c.s - sx[2].q.s), c.t + a * (c.t - sx[2].q.t)};
    };
    const ChartPoint xr = lerp(1.0);
    const double fr = F(xr);
    if (fr < sx[0].val) {
      const ChartPoint xe = lerp(2.0);
      const double fe = F(xe);
      sx[2] = fe < fr ? V{xe, fe} : V{xr, fr};
    } else if (fr < sx[1].val) {
      sx[2] = {xr, fr};
    } else {
      const ChartPoint xc = lerp(-0.5);
      const double fc = F(xc);
      if (fc < sx[2].val) {
        sx[2] = {xc, fc};
      } else {
        for (int i = 1; i < 3; ++i) {
          sx[i].q.s = 0.5 * (sx[i].q.s + sx[0].q.s);
          sx[i].q.t = 0.5 * (sx[i].q.t + sx[0].q.t);
          sx[i].val = F(sx[i].q);
        }
      }
    }
  }
  std::sort(sx.begin(), sx.end(), [](const V& a, const V& b) { return a.val < b.val; });
  return sx[0].q;
}

}  // namespace

ArgmaxResult argmax_theta(const Chart& chart, const RadialProfile& profile, int grid_n) {
  const auto sr = chart.s_range(), tr = chart.t_range();
  const double ms = chart.periodic_s() ? 0.0 : chart.boundary_margin() * (sr[1] - sr[0]);
  const double mt = chart.periodic_t() ? 0.0 : chart.boundary_margin() * (tr[1] - tr[0]);
  const double s0 = sr[0] + ms, s1 = sr[1] - ms;
  const double t0 = tr[0] + mt, t1 = tr[1] - mt;
  const int ns = grid_n, nt = grid_n;

  auto K_at = [&](ChartPoint q) {
    ChartPoint qc = q;
    if (!chart.periodic_s()) qc.s = std::clamp(q.s, s0, s1);
    if (!chart.periodic_t()) qc.t = std::clamp(q.t, t0, t1);
    return curvature_at(chart, qc).gauss;
  };

  double best = -1e300;
  ChartPoint best_q;
  std::vector<std::pair<ChartPoint, double>> samples;
  samples.reserve(static_cast<size_t>(ns) * nt);
  for (int i = 0; i < ns; ++i) {
    const double s =
        chart.periodic_s() ? s0 + (s1 - s0) * i / ns : s0 + (s1 - s0) * i / (ns - 1);
    for (int j = 0; j < nt; ++j) {
      const double t =
          chart.periodic_t() ? t0 + (t1 - t0) * j / nt : t0 + (t1 - t0) * j / (nt - 1);
      const double K = curvature_at(chart, {s, t}).gauss;
      samples.push_back({{s, t}, K});
      if (K > best) {
        best = K;
        best_q = {s, t};
      }
    }
  }

  ArgmaxResult out;
  const double tie_tol = 1e-9 * std::max(1.0, std::abs(best));
  for (const auto& [q, K] : samples)
    if (K >= best - tie_tol) out.ties.push_back(q);
  out.tie_flag = out.ties.size() > 1;

  const double cell = std::max((s1 - s0) / ns, (t1 - t0) / nt);
  ChartPoint refined = nelder_mead_max(K_at, best_q, cell, 300);
  if (!chart.periodic_s()) refined.s = std::clamp(refined.s, s0, s1);
  if (!chart.periodic_t()) refined.t = std::clamp(refined.t, t0, t1);
  if (chart.periodic_s()) {
    const double P = sr[1] - sr[0];
    refined.s = sr[0] + std::fmod(std::fmod(refined.s - sr[0], P) + P, P);
  }
  if (chart.periodic_t()) {
    const double P = tr[1] - tr[0];
    refined.t = tr[0] + std::fmod(std::fmod(refined.t - tr[0], P) + P, P);
  }
  out.point = refined;
  out.report = theta_ansatz(K_at(refined), profile);
  out.report.point = refined;
  return out;
}

// ---------------------------------------------------------------------------
// Volume expansion diagnostic

std::vector<VolumeExpansionRow> volume_expansion_test(const Chart& chart, ChartPoint y,
                                                      const RadialProfile& profile,
                                                      std::span<const double> eps_list) {
  const CurvatureData cd = curvature_at(chart, y);
  const ProfileInterp interp(profile);
  const double p = profile.params.p;
  const double r_end = interp.r_end();

  auto F_of = [&](double r) {
    const auto val = interp.eval(r);
    const double rho = std::hypot(val.u, val.v);
    return rho > 0.0 ? std::pow(rho, p) / p : 0.0;
  };

  const Moments mom = moment_integrals(profile);
  const double I_F = 2.0 * M_PI / p * mom.I_p0;

  constexpr int kTheta = 16;
  double limit = 0.0;
  {
    const int nr = 2000;
    const double hr = r_end / nr;
    std::vector<double> rad(nr + 1);
    for (int i = 0; i <= nr; ++i) {
      const double r = i * hr;
      double ang = 0.0;
      for (int jt = 0; jt < kTheta; ++jt) {
        const double th = 2.0 * M_PI * jt / kTheta;
        ang += cd.ricci({r * std::cos(th), r * std::sin(th)});
      }
      ang *= 2.0 * M_PI / kTheta;
      rad[i] = ang * F_of(r) * r;
    }
    limit = simpson_uniform(rad, hr) / 6.0;
  }

  std::vector<VolumeExpansionRow> rows;
  const double safe = chart.safe_radius(y);
  const Sym2 g0 = chart.metric(y);
  const Frame f0 = frame_of(g0);
  for (double eps : eps_list) {
    const double Rx = std::min(safe, eps * r_end);
    // radial nodes follow the profile scale z = r / eps, so the quadrature
    // error stays uniform in eps
    const double z_max = Rx / eps;
    const int nr = std::max(480, static_cast<int>(std::ceil(z_max / 0.008)));
    const double hr = Rx / nr;
    // One geodesic per direction, endpoints recorded at the radial nodes. By
    // the Gauss lemma the normal-coordinate metric in polar form is
    // dr^2 + q(r, th) dth^2, so sqrt(det g) in Cartesian normal coordinates is
    // sqrt(q)/r with q = g(dPhi/dth, dPhi/dth); the theta-derivative is taken
    // by a 4th-order periodic stencil across neighbouring rays.
    std::vector<std::array<double, 2>> ray(static_cast<size_t>(kTheta) * (nr + 1));
    for (int jt = 0; jt < kTheta; ++jt) {
      const double th = 2.0 * M_PI * jt / kTheta;
      const std::array<double, 2> dir{std::cos(th), std::sin(th)};
      GeoState s0;
      s0.q[0] = y.s;
      s0.q[1] = y.t;
      s0.p[0] = Rx * (dir[0] * f0.e[0][0] + dir[1] * f0.e[1][0]);
      s0.p[1] = Rx * (dir[0] * f0.e[0][1] + dir[1] * f0.e[1][1]);
      const int steps_per_node = 4;
      const int nsteps = nr * steps_per_node;
      int node = 1;
      ray[static_cast<size_t>(jt) * (nr + 1)] = {y.s, y.t};
      rk4_geodesic(chart, s0, nsteps, nullptr, [&](int count, const GeoState& st) {
        if (count % steps_per_node == 0 && node <= nr) {
          ray[static_cast<size_t>(jt) * (nr + 1) + node] = {st.q[0], st.q[1]};
          ++node;
        }
      });
    }
    // spectral differentiation matrix over the periodic ray family:
    // D_{jk} = (1/2) (-1)^{j-k} cot((j-k) pi / kTheta), exact for band-limited
    // angle dependence
    static const auto Dspec = [] {
      std::array<std::array<double, kTheta>, kTheta> D{};
      for (int j = 0; j < kTheta; ++j)
        for (int k = 0; k < kTheta; ++k) {
          if (j == k) continue;
          const int d = j - k;
          D[j][k] = 0.5 * ((d % 2 == 0) ? 1.0 : -1.0) /
                    std::tan(M_PI * static_cast<double>(d) / kTheta);
        }
      return D;
    }();
    std::vector<double> rad(nr + 1, 0.0);
    for (int i = 1; i <= nr; ++i) {
      const double r = i * hr;
      double ang = 0.0;
      for (int jt = 0; jt < kTheta; ++jt) {
        double dq0 = 0.0, dq1 = 0.0;
        for (int k = 0; k < kTheta; ++k) {
          const auto& pk = ray[static_cast<size_t>(k) * (nr + 1) + i];
          dq0 += Dspec[jt][k] * pk[0];
          dq1 += Dspec[jt][k] * pk[1];
        }
        const auto here = ray[static_cast<size_t>(jt) * (nr + 1) + i];
        const Sym2 G = chart.metric({here[0], here[1]});
        const double qv = G.a11 * dq0 * dq0 + 2.0 * G.a12 * dq0 * dq1 + G.a22 * dq1 * dq1;
        const double sqdet = std::sqrt(std::max(qv, 0.0)) / r;
        ang += F_of(r / eps) * sqdet;
      }
      ang *= 2.0 * M_PI / kTheta;
      rad[i] = ang * r;
    }
    const double I_eps = simpson_uniform(rad, hr);
    VolumeExpansionRow row;
    row.eps = eps;
    row.D_eps = (I_F - I_eps / (eps * eps)) / (eps * eps);
    row.limit = limit;
    row.rel_err =
        limit != 0.0 ? std::abs(row.D_eps - limit) / std::abs(limit) : std::abs(row.D_eps);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace syl

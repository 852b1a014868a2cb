#include "syl/bubble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "syl/clifford.hpp"
#include "syl/ode.hpp"
#include "syl/util.hpp"

namespace syl {

namespace {

constexpr double kOriginR = 1e-6;
constexpr size_t kGridPoints = 6001;

double f_pow(double s, double p) { return s <= 0.0 ? 0.0 : std::pow(s, p - 2.0); }

struct SeriesStart {
  double r0, u0, v0;
};

// u ~ c1 r^{S+1}, v ~ v0 r^S near the origin (S = 0: c1 = (lambda - f(v0)) v0 / 2)
SeriesStart series_start(double v0, const BubbleParams& prm) {
  SeriesStart s;
  s.r0 = kOriginR;
  if (prm.S == 0) {
    const double c1 = (prm.lambda - f_pow(v0, prm.p)) * v0 / 2.0;
    s.u0 = c1 * s.r0;
    s.v0 = v0 + (f_pow(v0, prm.p) + prm.lambda) * c1 * s.r0 * s.r0 / 2.0;
  } else {
    const double c1 = prm.lambda * v0 / (2.0 * (prm.S + 1));
    s.u0 = c1 * std::pow(s.r0, prm.S + 1);
    s.v0 = v0 * std::pow(s.r0, prm.S);
  }
  return s;
}

}  // namespace

void BubbleParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("BubbleParams: lambda must be > 0");
  if (!(p > 2.0 && p < 4.0)) throw std::invalid_argument("BubbleParams: p must lie in (2, 4)");
  if (S < 0) throw std::invalid_argument("BubbleParams: S < 0 is not supported");
  if (!(tol_shoot > 0.0) || !(tol_ode > 0.0)) throw std::invalid_argument("BubbleParams: bad tolerances");
  if (max_bisect < 1) throw std::invalid_argument("BubbleParams: max_bisect < 1");
}

double BubbleParams::amplitude_scale() const { return std::pow(lambda, 1.0 / (p - 2.0)); }

std::pair<double, double> radial_rhs(double r, double u, double v, const BubbleParams& prm) {
  if (!(r > 0.0)) throw std::domain_error("radial_rhs: r must be > 0");
  const double rho = std::hypot(u, v);
  const double fr = f_pow(rho, prm.p);
  return {-(prm.S + 1) * u / r - (fr - prm.lambda) * v, prm.S * v / r + (fr + prm.lambda) * u};
}

Trajectory shoot(double v0, const BubbleParams& prm) {
  prm.validate();
  if (!(v0 >= 0.0)) throw std::invalid_argument("shoot: v0 must be >= 0");
  Trajectory out;
  if (v0 == 0.0) {
    out.r = {0.0};
    out.u = {0.0};
    out.v = {0.0};
    out.cls = ShotClass::DECAYS;
    return out;
  }

  const double r_max = prm.effective_r_max();
  const double blow = 10.0 * std::max(v0, prm.amplitude_scale());

  DormandPrince<2> dp([&prm](double r, const std::array<double, 2>& y) {
    auto [du, dv] = radial_rhs(r, y[0], y[1], prm);
    return std::array<double, 2>{du, dv};
  });

  const SeriesStart st = series_start(v0, prm);
  OdeState<2> state;
  state.t = st.r0;
  state.y = {st.u0, st.v0};

  OdeOptions opt;
  opt.abs_tol = prm.tol_ode;
  opt.rel_tol = prm.tol_ode;
  opt.h_init = 1e-4;
  opt.h_max = 0.05;

  out.r.push_back(state.t);
  out.u.push_back(state.y[0]);
  out.v.push_back(state.y[1]);

  // establish the sign of u before arming the u-flip event
  const double u_thresh = 1e-9 * v0;
  double u_sign = 0.0;
  if (std::abs(st.u0) > u_thresh) {
    u_sign = st.u0 > 0.0 ? 1.0 : -1.0;
  } else {
    DormandPrince<2> pre([&prm](double r, const std::array<double, 2>& y) {
      auto [du, dv] = radial_rhs(r, y[0], y[1], prm);
      return std::array<double, 2>{du, dv};
    });
    pre.add_event([u_thresh](double, const std::array<double, 2>& y) {
      return std::abs(y[0]) - u_thresh;
    });
    int ev = -1;
    OdeStop stop = pre.integrate(state, std::min(0.5, r_max), opt, &ev,
                                 [&out](const OdeState<2>& s) {
                                   out.r.push_back(s.t);
                                   out.u.push_back(s.y[0]);
                                   out.v.push_back(s.y[1]);
                                 });
    if (stop == OdeStop::StepUnderflow) {
      out.integration_failed = true;
      return out;
    }
    if (stop != OdeStop::Event) {
      // u never left the axis: the orbit hugs the constant solution
      out.cls = ShotClass::U_DOMINATES;
      return out;
    }
    u_sign = state.y[0] > 0.0 ? 1.0 : -1.0;
  }

  DormandPrince<2> main([&prm](double r, const std::array<double, 2>& y) {
    auto [du, dv] = radial_rhs(r, y[0], y[1], prm);
    return std::array<double, 2>{du, dv};
  });
  main.add_event([](double, const std::array<double, 2>& y) { return y[1]; });           // 0: v flip
  main.add_event([u_sign](double, const std::array<double, 2>& y) { return u_sign * y[0]; });  // 1: u flip
  main.add_event([blow](double, const std::array<double, 2>& y) {
    return std::abs(y[0]) + std::abs(y[1]) - blow;  // 2: blow-up guard
  });

  int ev = -1;
  OdeStop stop = main.integrate(state, r_max, opt, &ev, [&out](const OdeState<2>& s) {
    out.r.push_back(s.t);
    out.u.push_back(s.y[0]);
    out.v.push_back(s.y[1]);
  });

  if (stop == OdeStop::StepUnderflow || stop == OdeStop::MaxSteps) {
    out.integration_failed = true;
    return out;
  }
  if (stop == OdeStop::Event) {
    if (ev == 0) {
      out.cls = ShotClass::V_CROSSES_ZERO;
    } else if (ev == 1) {
      out.cls = ShotClass::U_DOMINATES;
    } else {
      // blow-up without a sign flip yet: side decided by the sign of u
      out.cls = state.y[0] > 0.0 ? ShotClass::U_DOMINATES : ShotClass::V_CROSSES_ZERO;
    }
    return out;
  }
  const double rho_end = std::hypot(state.y[0], state.y[1]);
  if (rho_end < prm.tol_shoot * v0) {
    out.cls = ShotClass::DECAYS;
  } else {
    out.cls = state.y[0] > 0.0 ? ShotClass::U_DOMINATES : ShotClass::V_CROSSES_ZERO;
  }
  return out;
}

namespace {

// Integrate at fixed v0 writing (u, v) on the uniform profile grid.
RadialProfile integrate_profile(double v0, const BubbleParams& prm) {
  const double r_max = prm.effective_r_max();
  RadialProfile prof;
  prof.params = prm;
  prof.r.resize(kGridPoints);
  prof.u.resize(kGridPoints);
  prof.v.resize(kGridPoints);
  const double h = r_max / static_cast<double>(kGridPoints - 1);

  const SeriesStart st = series_start(v0, prm);
  // node 0 is the origin itself
  prof.r[0] = 0.0;
  prof.u[0] = 0.0;
  prof.v[0] = prm.S == 0 ? v0 : 0.0;

  DormandPrince<2> dp([&prm](double r, const std::array<double, 2>& y) {
    auto [du, dv] = radial_rhs(r, y[0], y[1], prm);
    return std::array<double, 2>{du, dv};
  });
  OdeState<2> state;
  state.t = st.r0;
  state.y = {st.u0, st.v0};
  OdeOptions opt;
  opt.abs_tol = prm.tol_ode;
  opt.rel_tol = prm.tol_ode;
  opt.h_init = 1e-4;
  opt.h_max = 0.05;

  const double blow = 20.0 * std::max(v0, prm.amplitude_scale());
  size_t last = kGridPoints - 1;
  for (size_t i = 1; i < kGridPoints; ++i) {
    const double target = static_cast<double>(i) * h;
    OdeStop stop = dp.integrate(state, target, opt);
    if (stop != OdeStop::ReachedEnd || std::abs(state.y[0]) + std::abs(state.y[1]) > blow) {
      last = i - 1;
      break;
    }
    prof.r[i] = target;
    prof.u[i] = state.y[0];
    prof.v[i] = state.y[1];
  }
  prof.r.resize(last + 1);
  prof.u.resize(last + 1);
  prof.v.resize(last + 1);
  return prof;
}

void truncate_at_min_rho(RadialProfile& prof) {
  const size_t n = prof.r.size();
  if (n < 16) return;
  size_t start = n / 4;
  size_t best = n - 1;
  double best_rho = std::numeric_limits<double>::infinity();
  for (size_t i = start; i < n; ++i) {
    const double rho = std::hypot(prof.u[i], prof.v[i]);
    if (rho < best_rho) {
      best_rho = rho;
      best = i;
    }
  }
  prof.r.resize(best + 1);
  prof.u.resize(best + 1);
  prof.v.resize(best + 1);
}

}  // namespace

GroundState find_ground_state(const BubbleParams& prm) {
  prm.validate();
  const double scale = prm.amplitude_scale();

  // geometric scan for the first capture -> overshoot transition
  constexpr int kScan = 81;
  double lo = 0.0, hi = 0.0;
  ShotClass prev_cls{};
  double prev_v0 = 0.0;
  bool have_prev = false;
  for (int i = 0; i < kScan; ++i) {
    const double v0 = 1e-2 * scale * std::pow(1e4, static_cast<double>(i) / (kScan - 1));
    Trajectory t = shoot(v0, prm);
    if (t.integration_failed) continue;
    if (have_prev && prev_cls == ShotClass::U_DOMINATES && t.cls == ShotClass::V_CROSSES_ZERO) {
      lo = prev_v0;
      hi = v0;
      break;
    }
    prev_cls = t.cls;
    prev_v0 = v0;
    have_prev = true;
  }
  if (hi == 0.0) throw NoBracketError("find_ground_state: no U_DOMINATES -> V_CROSSES_ZERO transition in scan");

  int it = 0;
  for (; it < prm.max_bisect; ++it) {
    const double mid = 0.5 * (lo + hi);
    Trajectory t = shoot(mid, prm);
    if (t.integration_failed) throw NotConvergedError("find_ground_state: integration failure during bisection");
    if (t.cls == ShotClass::DECAYS) {
      lo = hi = mid;
      break;
    }
    (t.cls == ShotClass::V_CROSSES_ZERO ? hi : lo) = mid;
    if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  if (it >= prm.max_bisect) throw NotConvergedError("find_ground_state: max_bisect exceeded");

  const double v0_star = 0.5 * (lo + hi);
  RadialProfile prof = integrate_profile(v0_star, prm);
  truncate_at_min_rho(prof);

  const double rho_end = std::hypot(prof.u.back(), prof.v.back());
  if (!(rho_end < prm.tol_shoot * v0_star))
    throw NotConvergedError("find_ground_state: truncated tail above tol_shoot");

  GroundState gs;
  gs.report.v0_star = v0_star;
  gs.report.decay_rate = decay_fit(prof);
  gs.profile = std::move(prof);
  gs.report.moments = moment_integrals(gs.profile);
  gs.report.mu0 = energy(gs.profile);
  gs.report.residual_2d = full_residual(gs.profile);
  return gs;
}

namespace {



// int_R^inf e^{-beta (r - R)} r dr and r^3 dr
double tail_moment1(double R, double beta) { return R / beta + 1.0 / (beta * beta); }
double tail_moment3(double R, double beta) {
  const double b2 = beta * beta;
  return R * R * R / beta + 3.0 * R * R / b2 + 6.0 * R / (b2 * beta) + 6.0 / (b2 * b2);
}

}  // namespace

Moments moment_integrals(const RadialProfile& prof) {
  const size_t n = prof.r.size();
  if (n < 8) return {};
  const double h = prof.r[1] - prof.r[0];
  std::vector<double> f0(n), f2(n);
  for (size_t i = 0; i < n; ++i) {
    const double rho = std::hypot(prof.u[i], prof.v[i]);
    const double rp = std::pow(rho, prof.params.p);
    f0[i] = rp * prof.r[i];
    f2[i] = rp * prof.r[i] * prof.r[i] * prof.r[i];
  }
  Moments m;
  m.I_p0 = simpson_uniform(f0, h);
  m.I_p2 = simpson_uniform(f2, h);
  // analytic tail beyond the grid
  const double rho_end = std::hypot(prof.u.back(), prof.v.back());
  if (rho_end > 0.0) {
    double rate;
    try {
      rate = decay_fit(prof);
    } catch (const TailUnderflowError&) {
      rate = 0.0;
    }
    if (rate > 0.0) {
      const double R = prof.r.back();
      const double beta = prof.params.p * rate;
      const double amp = std::pow(rho_end, prof.params.p);
      m.I_p0 += amp * tail_moment1(R, beta);
      m.I_p2 += amp * tail_moment3(R, beta);
    }
  }
  return m;
}

double energy(const RadialProfile& prof) {
  const Moments m = moment_integrals(prof);
  const double p = prof.params.p;
  return 2.0 * M_PI * (0.5 - 1.0 / p) * m.I_p0;
}

double energy_from_definition(const RadialProfile& prof) {
  // Phi = pi * int [ (u v' - u' v) r - (2S+1) u v + lambda (v^2 - u^2) r ] dr
  //       - (2 pi / p) int rho^p r dr
  // with radial derivatives by 4th-order finite differences.
  const size_t n = prof.r.size();
  const double h = prof.r[1] - prof.r[0];
  const auto du = fd_derivative4(prof.u, h);
  const auto dv = fd_derivative4(prof.v, h);
  const double lam = prof.params.lambda;
  const double p = prof.params.p;
  const int S = prof.params.S;
  std::vector<double> kin(n), pot(n);
  for (size_t i = 0; i < n; ++i) {
    const double r = prof.r[i], u = prof.u[i], v = prof.v[i];
    kin[i] = (u * dv[i] - du[i] * v) * r - (2 * S + 1) * u * v + lam * (v * v - u * u) * r;
    pot[i] = std::pow(std::hypot(u, v), p) * r;
  }
  return M_PI * simpson_uniform(kin, h) - (2.0 * M_PI / p) * simpson_uniform(pot, h);
}

double decay_fit(const RadialProfile& prof) {
  const size_t n = prof.r.size();
  if (n < 16) throw TailUnderflowError("decay_fit: profile too short");
  const size_t start = (2 * n) / 3;
  std::vector<double> xs, ys;
  xs.reserve(n - start);
  ys.reserve(n - start);
  for (size_t i = start; i < n; ++i) {
    const double rho = std::hypot(prof.u[i], prof.v[i]);
    if (rho <= 0.0) continue;
    xs.push_back(prof.r[i]);
    ys.push_back(std::log(rho));
  }
  if (xs.size() < 8) throw TailUnderflowError("decay_fit: tail vanished");
  return -linear_fit(xs, ys).slope;
}

double full_residual(const RadialProfile& prof, bool* zero_profile) {
  if (zero_profile) *zero_profile = false;
  const size_t n = prof.r.size();
  if (n < 8) return 0.0;
  const double h = prof.r[1] - prof.r[0];
  double rho_max = 0.0;
  for (size_t i = 0; i < n; ++i) rho_max = std::max(rho_max, std::hypot(prof.u[i], prof.v[i]));
  if (rho_max == 0.0) {
    if (zero_profile) *zero_profile = true;
    return 0.0;
  }

  const auto du = fd_derivative4(prof.u, h);
  const auto dv = fd_derivative4(prof.v, h);
  const auto& rep = pauli_rep();
  const double lam = prof.params.lambda;
  const double p = prof.params.p;
  const int S = prof.params.S;
  constexpr int kAngles = 48;
  const cplx I{0.0, 1.0};

  double num = 0.0, den = 0.0;
  // skip the innermost ring (1/r factors) and boundary FD rows
  for (size_t i = 2; i + 2 < n; i += 2) {
    const double r = prof.r[i];
    if (r < 4.0 * h) continue;
    const double u = prof.u[i], v = prof.v[i];
    const double rho = std::hypot(u, v);
    const double fr = f_pow(rho, p);
    const double w = r * h * (2.0 * M_PI / kAngles) * 2.0;  // cell weight (every other ring)
    for (int j = 0; j < kAngles; ++j) {
      const double th = (2.0 * M_PI * j) / kAngles;
      const cplx phS = std::exp(I * static_cast<double>(S) * th);
      const cplx phS1 = std::exp(I * static_cast<double>(S + 1) * th);
      const Vec2c psi{v * phS, I * u * phS1};
      // d_r psi and d_theta psi (the latter analytic)
      const Vec2c dpsi_r{dv[i] * phS, I * du[i] * phS1};
      const Vec2c dpsi_th{I * static_cast<double>(S) * psi.a,
                          I * static_cast<double>(S + 1) * psi.b};
      const double c = std::cos(th), s = std::sin(th);
      const Vec2c d1 = dpsi_r * c - dpsi_th * (s / r);
      const Vec2c d2 = dpsi_r * s + dpsi_th * (c / r);
      const Vec2c Dpsi = clifford_mul({1.0, 0.0}, d1) + clifford_mul({0.0, 1.0}, d2);
      const Vec2c mass = rep.gamma3 * psi * lam;
      const Vec2c nl = psi * fr;
      const Vec2c res = Dpsi + mass - nl;
      num += w * norm2(res);
      den += w * (norm2(Dpsi) + norm2(mass) + norm2(nl));
    }
  }
  if (den <= 0.0) {
    if (zero_profile) *zero_profile = true;
    return 0.0;
  }
  return std::sqrt(num / den);
}

ProfileInterp::ProfileInterp(const RadialProfile& profile) : prof_(profile) {
  const size_t n = prof_.r.size();
  if (n < 6) throw std::invalid_argument("ProfileInterp: profile too short");
  h_ = prof_.r[1] - prof_.r[0];
  r_end_ = prof_.r.back();
  // node slopes by finite differences of the stored samples, so the
  // interpolant does not assume the profile solves the radial system
  du_ = fd_derivative4(prof_.u, h_);
  dv_ = fd_derivative4(prof_.v, h_);
  try {
    tail_rate_ = decay_fit(prof_);
  } catch (const TailUnderflowError&) {
    tail_rate_ = prof_.params.lambda;
  }
}

ProfileInterp::Value ProfileInterp::eval(double r) const {
  if (r < 0.0) r = 0.0;
  const size_t n = prof_.r.size();
  if (r >= r_end_) {
    const double decay = std::exp(-tail_rate_ * (r - r_end_));
    const double u = prof_.u.back() * decay;
    const double v = prof_.v.back() * decay;
    return {u, v, -tail_rate_ * u, -tail_rate_ * v};
  }
  size_t i = std::min(static_cast<size_t>(r / h_), n - 2);
  const double x = (r - prof_.r[i]) / h_;
  const double x2 = x * x, x3 = x2 * x;
  const double H00 = 2 * x3 - 3 * x2 + 1, H10 = x3 - 2 * x2 + x;
  const double H01 = -2 * x3 + 3 * x2, H11 = x3 - x2;
  const double dH00 = (6 * x2 - 6 * x) / h_, dH10 = (3 * x2 - 4 * x + 1) / h_;
  const double dH01 = (-6 * x2 + 6 * x) / h_, dH11 = (3 * x2 - 2 * x) / h_;
  Value out;
  out.u = H00 * prof_.u[i] + H10 * h_ * du_[i] + H01 * prof_.u[i + 1] + H11 * h_ * du_[i + 1];
  out.v = H00 * prof_.v[i] + H10 * h_ * dv_[i] + H01 * prof_.v[i + 1] + H11 * h_ * dv_[i + 1];
  out.du = dH00 * prof_.u[i] + dH10 * h_ * du_[i] + dH01 * prof_.u[i + 1] + dH11 * h_ * du_[i + 1];
  out.dv = dH00 * prof_.v[i] + dH10 * h_ * dv_[i] + dH01 * prof_.v[i + 1] + dH11 * h_ * dv_[i + 1];
  return out;
}

RadialProfile scale_profile(const RadialProfile& unit, double lambda) {
  // psi_lambda(x) = lambda^{1/(p-2)} psi(lambda x)
  RadialProfile out;
  out.params = unit.params;
  out.params.lambda = unit.params.lambda * lambda;
  out.params.r_max = unit.params.effective_r_max() / lambda;
  const double amp = std::pow(lambda, 1.0 / (unit.params.p - 2.0));
  const size_t n = unit.r.size();
  out.r.resize(n);
  out.u.resize(n);
  out.v.resize(n);
  for (size_t i = 0; i < n; ++i) {
    out.r[i] = unit.r[i] / lambda;
    out.u[i] = amp * unit.u[i];
    out.v[i] = amp * unit.v[i];
  }
  return out;
}

}  // namespace syl

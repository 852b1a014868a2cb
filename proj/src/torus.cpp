#include "syl/torus.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "syl/util.hpp"

namespace syl {

namespace {

// integer mode number for FFT index i (0, 1, ..., N/2-1, -N/2, ..., -1)
int mode_of(int i, int N) { return i < N / 2 ? i : i - N; }

}  // namespace

void TorusGrid::validate() const {
  if (N1 < 16 || N2 < 16 || N1 % 2 || N2 % 2)
    throw std::invalid_argument("TorusGrid: mode counts must be even and >= 16");
  if (!(L1 > 0.0) || !(L2 > 0.0)) throw std::invalid_argument("TorusGrid: periods must be > 0");
  auto ok = [](double d) { return d == 0.0 || d == 0.5; };
  if (!ok(delta1) || !ok(delta2))
    throw std::invalid_argument("TorusGrid: spin offsets must be 0 or 1/2");
}

void SolverConfig::validate() const {
  grid.validate();
  if (!(eps > 0.0) || !(a > 0.0)) throw std::invalid_argument("SolverConfig: eps, a must be > 0");
  if (!(p > 2.0 && p < 4.0)) throw std::invalid_argument("SolverConfig: p must lie in (2, 4)");
  if (!(tol_inner > 0.0) || !(tol_outer > 0.0))
    throw std::invalid_argument("SolverConfig: bad tolerances");
}

FourierSpinor FourierSpinor::zero(const TorusGrid& g, SpinorRep rep) {
  FourierSpinor f;
  f.grid = g;
  f.rep = rep;
  f.data.assign(2 * static_cast<size_t>(g.N1) * g.N2, cplx{0.0, 0.0});
  return f;
}

struct TorusSolver::Fft {
  fftw_plan fwd = nullptr, bwd = nullptr;
  fftw_complex* buf = nullptr;
  size_t n = 0;

  Fft(int N1, int N2) {
    n = static_cast<size_t>(N1) * N2;
    buf = fftw_alloc_complex(n);
    fwd = fftw_plan_dft_2d(N1, N2, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_2d(N1, N2, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(buf);
  }
  void run(std::vector<cplx>& interleaved, bool forward) const {
    // transform each spinor component in place
    for (int comp = 0; comp < 2; ++comp) {
      for (size_t s = 0; s < n; ++s) {
        buf[s][0] = interleaved[2 * s + comp].real();
        buf[s][1] = interleaved[2 * s + comp].imag();
      }
      fftw_execute(forward ? fwd : bwd);
      for (size_t s = 0; s < n; ++s) interleaved[2 * s + comp] = cplx{buf[s][0], buf[s][1]};
    }
  }
};

TorusSolver::TorusSolver(const SolverConfig& config) : cfg_(config) {
  cfg_.validate();
  symbols_ = assemble(cfg_.grid, cfg_.eps, cfg_.a);
  const auto& g = cfg_.grid;
  mu_.resize(symbols_.size());
  keep_.assign(symbols_.size(), true);
  const int c1 = g.N1 / 3, c2 = g.N2 / 3;
  for (int i1 = 0; i1 < g.N1; ++i1)
    for (int i2 = 0; i2 < g.N2; ++i2) {
      const size_t idx = static_cast<size_t>(i1) * g.N2 + i2;
      mu_[idx] = symbols_[idx].eig_plus;
      if (cfg_.dealias)
        keep_[idx] = std::abs(mode_of(i1, g.N1)) <= c1 && std::abs(mode_of(i2, g.N2)) <= c2;
    }
  fft_ = std::make_unique<Fft>(g.N1, g.N2);
}

TorusSolver::~TorusSolver() = default;

std::vector<ModeSymbol> assemble(const TorusGrid& grid, double eps, double a) {
  grid.validate();
  std::vector<ModeSymbol> out(static_cast<size_t>(grid.N1) * grid.N2);
  for (int i1 = 0; i1 < grid.N1; ++i1)
    for (int i2 = 0; i2 < grid.N2; ++i2) {
      const double k1 = 2.0 * M_PI * (mode_of(i1, grid.N1) + grid.delta1) / grid.L1;
      const double k2 = 2.0 * M_PI * (mode_of(i2, grid.N2) + grid.delta2) / grid.L2;
      out[static_cast<size_t>(i1) * grid.N2 + i2] = dirac_symbol({k1, k2}, eps, a);
    }
  return out;
}

FourierSpinor TorusSolver::to_physical(const FourierSpinor& c) const {
  if (c.rep != SpinorRep::FOURIER)
    throw std::invalid_argument("to_physical: expected FOURIER rep");
  if (!(c.grid == cfg_.grid)) throw std::invalid_argument("to_physical: grid mismatch");
  FourierSpinor out = c;
  fft_->run(out.data, /*forward=*/false);  // unnormalized sum over modes
  const auto& g = cfg_.grid;
  if (g.delta1 != 0.0 || g.delta2 != 0.0) {
    for (int i1 = 0; i1 < g.N1; ++i1)
      for (int i2 = 0; i2 < g.N2; ++i2) {
        const double ph = 2.0 * M_PI * (g.delta1 * i1 / g.N1 + g.delta2 * i2 / g.N2);
        const cplx f = std::exp(cplx{0.0, ph});
        const size_t idx = 2 * (static_cast<size_t>(i1) * g.N2 + i2);
        out.data[idx] *= f;
        out.data[idx + 1] *= f;
      }
  }
  out.rep = SpinorRep::PHYSICAL;
  return out;
}

FourierSpinor TorusSolver::to_fourier(const FourierSpinor& ph) const {
  if (ph.rep != SpinorRep::PHYSICAL)
    throw std::invalid_argument("to_fourier: expected PHYSICAL rep");
  if (!(ph.grid == cfg_.grid)) throw std::invalid_argument("to_fourier: grid mismatch");
  FourierSpinor out = ph;
  const auto& g = cfg_.grid;
  if (g.delta1 != 0.0 || g.delta2 != 0.0) {
    for (int i1 = 0; i1 < g.N1; ++i1)
      for (int i2 = 0; i2 < g.N2; ++i2) {
        const double phs = 2.0 * M_PI * (g.delta1 * i1 / g.N1 + g.delta2 * i2 / g.N2);
        const cplx f = std::exp(cplx{0.0, -phs});
        const size_t idx = 2 * (static_cast<size_t>(i1) * g.N2 + i2);
        out.data[idx] *= f;
        out.data[idx + 1] *= f;
      }
  }
  fft_->run(out.data, /*forward=*/true);
  const double scale = 1.0 / (static_cast<double>(g.N1) * g.N2);
  for (size_t m = 0; m < out.sites(); ++m) {
    const double mask = keep_[m] ? scale : 0.0;
    out.data[2 * m] *= mask;
    out.data[2 * m + 1] *= mask;
  }
  out.rep = SpinorRep::FOURIER;
  return out;
}

FourierSpinor TorusSolver::project_plus(const FourierSpinor& c) const {
  if (c.rep != SpinorRep::FOURIER) throw std::invalid_argument("project_plus: expected FOURIER");
  FourierSpinor out = c;
  for (size_t m = 0; m < c.sites(); ++m) {
    const Mat2c& P = symbols_[m].proj_plus;
    const Vec2c v{c.data[2 * m], c.data[2 * m + 1]};
    const Vec2c w = P * v;
    out.data[2 * m] = w.a;
    out.data[2 * m + 1] = w.b;
  }
  return out;
}

FourierSpinor TorusSolver::project_minus(const FourierSpinor& c) const {
  if (c.rep != SpinorRep::FOURIER) throw std::invalid_argument("project_minus: expected FOURIER");
  FourierSpinor out = c;
  for (size_t m = 0; m < c.sites(); ++m) {
    const Mat2c& P = symbols_[m].proj_minus;
    const Vec2c v{c.data[2 * m], c.data[2 * m + 1]};
    const Vec2c w = P * v;
    out.data[2 * m] = w.a;
    out.data[2 * m + 1] = w.b;
  }
  return out;
}

double TorusSolver::inner_eps(const FourierSpinor& x, const FourierSpinor& y) const {
  if (x.rep != SpinorRep::FOURIER || y.rep != SpinorRep::FOURIER)
    throw std::invalid_argument("inner_eps: expected FOURIER rep");
  double s = 0.0;
  for (size_t m = 0; m < x.sites(); ++m)
    s += mu_[m] * (std::real(x.data[2 * m] * std::conj(y.data[2 * m])) +
                   std::real(x.data[2 * m + 1] * std::conj(y.data[2 * m + 1])));
  return s * cfg_.grid.L1 * cfg_.grid.L2 / (cfg_.eps * cfg_.eps);
}

double TorusSolver::norm_eps(const FourierSpinor& x) const {
  return std::sqrt(std::max(0.0, inner_eps(x, x)));
}

double TorusSolver::nonlinear_integral(const FourierSpinor& c) const {
  const FourierSpinor ph = c.rep == SpinorRep::PHYSICAL ? c : to_physical(c);
  double s = 0.0;
  for (size_t m = 0; m < ph.sites(); ++m) {
    const double rho2 = std::norm(ph.data[2 * m]) + std::norm(ph.data[2 * m + 1]);
    s += std::pow(rho2, cfg_.p / 2.0);
  }
  const auto& g = cfg_.grid;
  const double dx2 = (g.L1 / g.N1) * (g.L2 / g.N2);
  return s / cfg_.p * dx2 / (cfg_.eps * cfg_.eps);
}

double TorusSolver::energy_L(const FourierSpinor& c) const {
  const FourierSpinor cp = project_plus(c);
  double quad = 0.0;
  for (size_t m = 0; m < c.sites(); ++m) {
    const Vec2c v{c.data[2 * m], c.data[2 * m + 1]};
    const Vec2c vp{cp.data[2 * m], cp.data[2 * m + 1]};
    const Vec2c vm = v - vp;
    quad += mu_[m] * (norm2(vp) - norm2(vm));
  }
  quad *= 0.5 * cfg_.grid.L1 * cfg_.grid.L2 / (cfg_.eps * cfg_.eps);
  return quad - nonlinear_integral(c);
}

FourierSpinor TorusSolver::grad_L(const FourierSpinor& c) const {
  // nonlinear term f(|psi|) psi assembled in physical space
  FourierSpinor ph = to_physical(c);
  for (size_t m = 0; m < ph.sites(); ++m) {
    const double rho = std::sqrt(std::norm(ph.data[2 * m]) + std::norm(ph.data[2 * m + 1]));
    const double fr = rho > 0.0 ? std::pow(rho, cfg_.p - 2.0) : 0.0;
    ph.data[2 * m] *= fr;
    ph.data[2 * m + 1] *= fr;
  }
  const FourierSpinor Nc = to_fourier(ph);
  FourierSpinor out = project_plus(c);  // will become psi+ - psi- - N/mu
  for (size_t m = 0; m < c.sites(); ++m) {
    const Vec2c v{c.data[2 * m], c.data[2 * m + 1]};
    const Vec2c vp{out.data[2 * m], out.data[2 * m + 1]};
    const Vec2c vm = v - vp;
    const Vec2c nml{Nc.data[2 * m] / mu_[m], Nc.data[2 * m + 1] / mu_[m]};
    const Vec2c r = vp - vm - nml;
    out.data[2 * m] = r.a;
    out.data[2 * m + 1] = r.b;
  }
  return out;
}

namespace {

FourierSpinor axpy(const FourierSpinor& x, double alpha, const FourierSpinor& y) {
  FourierSpinor out = x;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += alpha * y.data[i];
  return out;
}

FourierSpinor scaled(const FourierSpinor& x, double alpha) {
  FourierSpinor out = x;
  for (auto& v : out.data) v *= alpha;
  return out;
}

}  // namespace

TorusSolver::ChiResult TorusSolver::inner_maximize(const FourierSpinor& u,
                                                   const FourierSpinor* warm) const {
  ChiResult res;
  res.w = warm ? *warm : FourierSpinor::zero(cfg_.grid);
  const double un = std::max(1.0, norm_eps(u));
  double h = energy_L(axpy(u, 1.0, res.w));
  FourierSpinor w_prev = res.w, d_prev = res.w;
  bool have_prev = false;
  double step = 0.25;
  for (int it = 0; it < cfg_.max_inner; ++it) {
    // E- gradient of w -> L(u + w) is -w - P^- G(u + w)
    const FourierSpinor d = project_minus(grad_L(axpy(u, 1.0, res.w)));
    const double nd = norm_eps(d);
    res.grad_norm = nd;
    res.iterations = it;
    if (nd < cfg_.tol_inner * un) return res;
    if (have_prev) {
      const FourierSpinor dw = axpy(res.w, -1.0, w_prev);
      const FourierSpinor dd = axpy(d, -1.0, d_prev);
      const double den = inner_eps(dw, dd);
      step = std::abs(den) > 1e-300 ? std::abs(inner_eps(dw, dw) / den) : 0.25;
      step = std::clamp(step, 1e-4, 4.0);
    }
    w_prev = res.w;
    d_prev = d;
    have_prev = true;
    if (step * nd * nd < 1e-13 * std::max(1.0, std::abs(h))) {
      // expected gain below the energy noise floor: take the step as-is
      res.w = axpy(res.w, step, d);
      h = energy_L(axpy(u, 1.0, res.w));
      continue;
    }
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      FourierSpinor w2 = axpy(res.w, step, d);
      const double h2 = energy_L(axpy(u, 1.0, w2));
      if (std::isfinite(h2) && h2 >= h + 1e-4 * step * nd * nd) {
        res.w = std::move(w2);
        h = h2;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return res;  // stalled within roundoff of the maximum
  }
  throw SolverNotConverged("inner_maximize: max_inner exceeded");
}

double TorusSolver::reduced_I(const FourierSpinor& u, const FourierSpinor* warm) const {
  const ChiResult chi = inner_maximize(u, warm);
  return energy_L(axpy(u, 1.0, chi.w));
}

double TorusSolver::line_derivative(double t, const FourierSpinor& u, FourierSpinor* warm) const {
  const FourierSpinor tu = scaled(u, t);
  const ChiResult chi = inner_maximize(tu, warm ? warm : nullptr);
  if (warm) *warm = chi.w;
  return inner_eps(grad_L(axpy(tu, 1.0, chi.w)), u);
}

double TorusSolver::line_max_t(const FourierSpinor& u, FourierSpinor* warm, double t_init) const {
  if (norm_eps(u) < 1e-12) throw NoSignChangeError("line_max_t: degenerate input");
  FourierSpinor w_local = warm ? *warm : FourierSpinor::zero(cfg_.grid);
  double t1 = t_init;
  double d1 = line_derivative(t1, u, &w_local);
  double t2 = d1 > 0.0 ? t1 * 1.3 : t1 * 0.77;
  double d2 = line_derivative(t2, u, &w_local);
  int guard = 0;
  while (d1 * d2 > 0.0) {
    t1 = t2;
    d1 = d2;
    t2 = d2 > 0.0 ? t2 * 1.6 : t2 * 0.625;
    d2 = line_derivative(t2, u, &w_local);
    if (++guard > 80 || t2 > 1e8 || t2 < 1e-10)
      throw NoSignChangeError("line_max_t: no sign change of dI/dt");
  }
  double tm = 0.5 * (t1 + t2);
  for (int it = 0; it < 80; ++it) {
    tm = t2 - d2 * (t2 - t1) / (d2 - d1);
    const double lo = std::min(t1, t2), hi = std::max(t1, t2);
    if (!(tm > lo && tm < hi)) tm = 0.5 * (t1 + t2);
    const double dm = line_derivative(tm, u, &w_local);
    if (std::abs(t2 - t1) < 1e-12 * tm || dm == 0.0) break;
    if (dm * d1 > 0.0) {
      t1 = tm;
      d1 = dm;
    } else {
      t2 = tm;
      d2 = dm;
    }
  }
  if (warm) *warm = w_local;
  return tm;
}

RadialProfile TorusSolver::bubble_profile() const {
  BubbleParams prm;
  prm.lambda = cfg_.a;
  prm.p = cfg_.p;
  return find_ground_state(prm).profile;
}

FourierSpinor TorusSolver::transplant(const RadialProfile& profile,
                                      std::array<double, 2> x0) const {
  const auto& g = cfg_.grid;
  const ProfileInterp interp(profile);
  FourierSpinor ph = FourierSpinor::zero(g, SpinorRep::PHYSICAL);
  const double rc = std::min(g.L1, g.L2) / 8.0;  // eta == 1 inside rc, 0 beyond 2 rc
  const cplx I{0.0, 1.0};
  const int S = profile.params.S;
  for (int i1 = 0; i1 < g.N1; ++i1) {
    const double x1 = g.L1 * i1 / g.N1;
    double dx1 = x1 - x0[0];
    dx1 -= g.L1 * std::round(dx1 / g.L1);
    for (int i2 = 0; i2 < g.N2; ++i2) {
      const double x2 = g.L2 * i2 / g.N2;
      double dx2 = x2 - x0[1];
      dx2 -= g.L2 * std::round(dx2 / g.L2);
      const double r = std::hypot(dx1, dx2);
      double eta = 1.0;
      if (r >= 2.0 * rc) {
        continue;
      } else if (r > rc) {
        const double t = (r - rc) / rc;
        eta = 1.0 - (10 * t * t * t - 15 * t * t * t * t + 6 * t * t * t * t * t);
      }
      const double th = std::atan2(dx2, dx1);
      const auto val = interp.eval(r / cfg_.eps);
      const size_t idx = 2 * (static_cast<size_t>(i1) * g.N2 + i2);
      ph.data[idx] = eta * val.v * std::exp(I * static_cast<double>(S) * th);
      ph.data[idx + 1] = eta * I * val.u * std::exp(I * static_cast<double>(S + 1) * th);
    }
  }
  return to_fourier(ph);
}

FourierSpinor TorusSolver::make_seed() const {
  if (cfg_.seed_mode == SolverConfig::Seed::BUBBLE_TRANSPLANT) {
    std::array<double, 2> x0 = cfg_.seed_center;
    if (x0[0] < 0.0) x0[0] = cfg_.grid.L1 / 2.0;
    if (x0[1] < 0.0) x0[1] = cfg_.grid.L2 / 2.0;
    return project_plus(transplant(bubble_profile(), x0));
  }
  // RANDOM: deterministic low-mode Gaussian field
  std::mt19937_64 rng(cfg_.seed_value);
  std::normal_distribution<double> gauss;
  FourierSpinor c = FourierSpinor::zero(cfg_.grid);
  const auto& g = cfg_.grid;
  for (int i1 = 0; i1 < g.N1; ++i1)
    for (int i2 = 0; i2 < g.N2; ++i2) {
      const int j1 = mode_of(i1, g.N1), j2 = mode_of(i2, g.N2);
      if (std::abs(j1) > 6 || std::abs(j2) > 6) continue;
      const double damp = std::exp(-(j1 * j1 + j2 * j2) / 18.0);
      const size_t idx = 2 * (static_cast<size_t>(i1) * g.N2 + i2);
      c.data[idx] = damp * cplx{gauss(rng), gauss(rng)};
      c.data[idx + 1] = damp * cplx{gauss(rng), gauss(rng)};
    }
  FourierSpinor cp = project_plus(c);
  const double n = norm_eps(cp);
  if (n > 0.0) cp = scaled(cp, std::pow(cfg_.a, 1.0 / (cfg_.p - 2.0)) * 3.0 / n);
  return cp;
}

SolveResult TorusSolver::minimize_nehari() const { return minimize_nehari(make_seed()); }

SolveResult TorusSolver::minimize_nehari(const FourierSpinor& seed_plus) const {
  SolveResult res;
  FourierSpinor u = seed_plus;
  FourierSpinor w = FourierSpinor::zero(cfg_.grid);
  double ts = line_max_t(u, &w);
  u = scaled(u, ts);
  res.t_star.push_back(ts);

  FourierSpinor u_prev = u, g_prev = u;
  bool have_prev = false;
  double I_cur = 0.0;
  for (int it = 0; it < cfg_.max_outer; ++it) {
    const ChiResult chi = inner_maximize(u, &w);
    w = chi.w;
    const FourierSpinor psi = axpy(u, 1.0, w);
    const FourierSpinor gfull = grad_L(psi);
    const double gn = norm_eps(gfull);
    I_cur = energy_L(psi);
    res.iterations = it;
    res.grad_norm = gn;
    if (gn < cfg_.tol_outer) {
      res.converged = true;
      res.psi = psi;
      break;
    }
    const FourierSpinor gI = project_plus(gfull);
    double step = 0.5;
    if (have_prev) {
      const FourierSpinor du = axpy(u, -1.0, u_prev);
      const FourierSpinor dg = axpy(gI, -1.0, g_prev);
      const double den = inner_eps(du, dg);
      step = std::abs(den) > 1e-300 ? std::abs(inner_eps(du, du) / den) : 0.5;
      step = std::clamp(step, 1e-4, 20.0);
    }
    u_prev = u;
    g_prev = gI;
    have_prev = true;

    bool moved = false;
    bool have_trial = false;
    FourierSpinor u_trial = u, w_trial = w;
    double ts_trial = ts;
    const double noise = 1e-12 * std::max(1.0, std::abs(I_cur));
    for (int ls = 0; ls < 35; ++ls) {
      FourierSpinor u2 = axpy(u, -step, gI);
      FourierSpinor w2 = w;
      double ts2;
      try {
        ts2 = line_max_t(u2, &w2, ts);
      } catch (const NoSignChangeError&) {
        step *= 0.5;
        continue;
      }
      u2 = scaled(u2, ts2);
      const ChiResult chi2 = inner_maximize(u2, &w2);
      const double I2 = energy_L(axpy(u2, 1.0, chi2.w));
      u_trial = u2;
      w_trial = chi2.w;
      ts_trial = ts2;
      have_trial = true;
      if (I2 < I_cur + noise) {
        u = std::move(u2);
        w = chi2.w;
        ts = ts2;
        res.t_star.push_back(ts);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      // near the critical point the energy comparison drowns in roundoff;
      // keep stepping on the smallest trial while the gradient is small
      if (have_trial && gn < 1e3 * cfg_.tol_outer) {
        u = std::move(u_trial);
        w = std::move(w_trial);
        ts = ts_trial;
        res.t_star.push_back(ts);
      } else {
        throw SaddleEscapeError("minimize_nehari: energy increased on all trial steps");
      }
    }
  }
  if (!res.converged) throw SolverNotConverged("minimize_nehari: max_outer exceeded");
  res.mu_eps = I_cur;
  res.loc = localization_report(res.psi);
  return res;
}

LocalizationReport TorusSolver::localization_report(const FourierSpinor& psi) const {
  const FourierSpinor ph = psi.rep == SpinorRep::PHYSICAL ? psi : to_physical(psi);
  const auto& g = cfg_.grid;
  LocalizationReport rep;
  std::vector<double> ab(ph.sites());
  double mx = -1.0;
  for (int i1 = 0; i1 < g.N1; ++i1)
    for (int i2 = 0; i2 < g.N2; ++i2) {
      const size_t m = static_cast<size_t>(i1) * g.N2 + i2;
      ab[m] = std::sqrt(std::norm(ph.data[2 * m]) + std::norm(ph.data[2 * m + 1]));
      if (ab[m] > mx) {
        mx = ab[m];
        rep.peak_index = {i1, i2};
      }
    }
  for (size_t m = 0; m < ab.size(); ++m) {
    const int i1 = static_cast<int>(m) / g.N2, i2 = static_cast<int>(m) % g.N2;
    if ((i1 != rep.peak_index[0] || i2 != rep.peak_index[1]) && ab[m] > mx * (1.0 - 1e-12))
      rep.peak_tie = true;
  }
  rep.peak = {g.L1 * rep.peak_index[0] / g.N1, g.L2 * rep.peak_index[1] / g.N2};

  auto dist_to_peak = [&](int i1, int i2) {
    double d1 = g.L1 * i1 / g.N1 - rep.peak[0];
    double d2 = g.L2 * i2 / g.N2 - rep.peak[1];
    d1 -= g.L1 * std::round(d1 / g.L1);
    d2 -= g.L2 * std::round(d2 / g.L2);
    return std::hypot(d1, d2);
  };

  double width = 0.0;
  double floor = 0.0;
  const double far = 0.35 * std::min(g.L1, g.L2);
  for (int i1 = 0; i1 < g.N1; ++i1)
    for (int i2 = 0; i2 < g.N2; ++i2) {
      const size_t m = static_cast<size_t>(i1) * g.N2 + i2;
      const double d = dist_to_peak(i1, i2);
      if (ab[m] >= 0.5 * mx) width = std::max(width, d);
      if (d > far) floor = std::max(floor, ab[m]);
    }
  rep.width = width;

  // mid-range fit of log|psi| against dist/eps, above the truncation floor
  double lo_cut = std::max(3.0 * floor, 1e-8 * mx);
  double hi_cut = 0.25 * mx;
  for (int widen = 0; widen < 3; ++widen) {
    std::vector<double> xs, ys;
    for (int i1 = 0; i1 < g.N1; ++i1)
      for (int i2 = 0; i2 < g.N2; ++i2) {
        const size_t m = static_cast<size_t>(i1) * g.N2 + i2;
        if (ab[m] > lo_cut && ab[m] < hi_cut) {
          xs.push_back(dist_to_peak(i1, i2) / cfg_.eps);
          ys.push_back(std::log(ab[m]));
        }
      }
    if (xs.size() >= 24) {
      const LinearFit f = linear_fit(xs, ys);
      rep.decay_c = -f.slope;
      rep.decay_r2 = f.r2;
      break;
    }
    lo_cut = std::max(1.2 * floor, lo_cut / 4.0);
    hi_cut = std::min(0.6 * mx, hi_cut * 2.0);
  }
  return rep;
}

double TorusSolver::energy_identity_residual(const FourierSpinor& psi, double mu) const {
  const FourierSpinor ph = psi.rep == SpinorRep::PHYSICAL ? psi : to_physical(psi);
  double s = 0.0;
  for (size_t m = 0; m < ph.sites(); ++m) {
    const double rho = std::sqrt(std::norm(ph.data[2 * m]) + std::norm(ph.data[2 * m + 1]));
    if (rho > 0.0) {
      const double f = std::pow(rho, cfg_.p - 2.0);
      s += 0.5 * f * rho * rho - std::pow(rho, cfg_.p) / cfg_.p;
    }
  }
  const auto& g = cfg_.grid;
  s *= (g.L1 / g.N1) * (g.L2 / g.N2) / (cfg_.eps * cfg_.eps);
  return std::abs(mu - s) / std::max(1e-300, std::abs(mu));
}

FourierSpinor TorusSolver::rescale_about(const FourierSpinor& c, std::array<double, 2> x0,
                                         double factor) const {
  if (c.rep != SpinorRep::FOURIER) throw std::invalid_argument("rescale_about: expected FOURIER");
  const auto& g = cfg_.grid;
  // separable evaluation of psi(x0 + factor (x - x0)) at the grid nodes
  const int N1 = g.N1, N2 = g.N2;
  std::vector<cplx> E1(static_cast<size_t>(N1) * N1), E2(static_cast<size_t>(N2) * N2);
  for (int i = 0; i < N1; ++i) {
    const double xp = x0[0] + factor * (g.L1 * i / N1 - x0[0]);
    for (int j = 0; j < N1; ++j) {
      const double k = 2.0 * M_PI * (mode_of(j, N1) + g.delta1) / g.L1;
      E1[static_cast<size_t>(i) * N1 + j] = std::exp(cplx{0.0, k * xp});
    }
  }
  for (int i = 0; i < N2; ++i) {
    const double xp = x0[1] + factor * (g.L2 * i / N2 - x0[1]);
    for (int j = 0; j < N2; ++j) {
      const double k = 2.0 * M_PI * (mode_of(j, N2) + g.delta2) / g.L2;
      E2[static_cast<size_t>(i) * N2 + j] = std::exp(cplx{0.0, k * xp});
    }
  }
  FourierSpinor ph = FourierSpinor::zero(g, SpinorRep::PHYSICAL);
  for (int comp = 0; comp < 2; ++comp) {
    std::vector<cplx> tmp(static_cast<size_t>(N1) * N2, cplx{0.0, 0.0});
    for (int j1 = 0; j1 < N1; ++j1)
      for (int i2 = 0; i2 < N2; ++i2) {
        cplx s{0.0, 0.0};
        for (int j2 = 0; j2 < N2; ++j2)
          s += c.data[2 * (static_cast<size_t>(j1) * N2 + j2) + comp] *
               E2[static_cast<size_t>(i2) * N2 + j2];
        tmp[static_cast<size_t>(j1) * N2 + i2] = s;
      }
    for (int i1 = 0; i1 < N1; ++i1)
      for (int i2 = 0; i2 < N2; ++i2) {
        cplx s{0.0, 0.0};
        for (int j1 = 0; j1 < N1; ++j1)
          s += E1[static_cast<size_t>(i1) * N1 + j1] * tmp[static_cast<size_t>(j1) * N2 + i2];
        ph.data[2 * (static_cast<size_t>(i1) * N2 + i2) + comp] = s;
      }
  }
  // cutoff around x0: expanded arguments (factor > 1) re-enter the torus and
  // would drag wrapped copies of the spike into the seed
  const double rc = std::min(g.L1, g.L2) / 8.0;
  for (int i1 = 0; i1 < N1; ++i1) {
    double dx1 = g.L1 * i1 / N1 - x0[0];
    dx1 -= g.L1 * std::round(dx1 / g.L1);
    for (int i2 = 0; i2 < N2; ++i2) {
      double dx2 = g.L2 * i2 / N2 - x0[1];
      dx2 -= g.L2 * std::round(dx2 / g.L2);
      const double r = std::hypot(dx1, dx2);
      double eta = 1.0;
      if (r >= 2.0 * rc) {
        eta = 0.0;
      } else if (r > rc) {
        const double t = (r - rc) / rc;
        eta = 1.0 - (10 * t * t * t - 15 * t * t * t * t + 6 * t * t * t * t * t);
      }
      const size_t idx = 2 * (static_cast<size_t>(i1) * N2 + i2);
      ph.data[idx] *= eta;
      ph.data[idx + 1] *= eta;
    }
  }
  return to_fourier(ph);
}

std::vector<SweepRow> sweep_eps(const SolverConfig& base, const std::vector<double>& eps_list) {
  for (size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("sweep_eps: eps list must be strictly decreasing");

  std::vector<SweepRow> rows;
  std::optional<FourierSpinor> prev_psi;
  std::array<double, 2> prev_peak{base.grid.L1 / 2.0, base.grid.L2 / 2.0};
  double prev_eps = 0.0;
  for (double eps : eps_list) {
    SolverConfig cfg = base;
    cfg.eps = eps;
    TorusSolver solver(cfg);
    SweepRow row;
    row.eps = eps;
    try {
      SolveResult result;
      if (prev_psi) {
        // contract the previous solution about its peak by eps_new / eps_old
        FourierSpinor warm = solver.project_plus(
            solver.rescale_about(prev_psi.value(), prev_peak, prev_eps / eps));
        result = solver.minimize_nehari(warm);
      } else {
        result = solver.minimize_nehari();
      }
      row.mu_eps = result.mu_eps;
      row.width = result.loc.width;
      row.decay_c = result.loc.decay_c;
      row.grad_norm = result.grad_norm;
      row.converged = result.converged;
      prev_psi = std::move(result.psi);
      prev_peak = result.loc.peak;
      prev_eps = eps;
    } catch (const std::runtime_error&) {
      row.converged = false;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace syl

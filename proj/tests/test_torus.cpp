#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "syl/torus.hpp"

using namespace syl;

namespace {

SolverConfig small_config(double eps = 0.3, int N = 32) {
  SolverConfig cfg;
  cfg.grid.N1 = cfg.grid.N2 = N;
  cfg.eps = eps;
  return cfg;
}

FourierSpinor random_spinor(const TorusSolver& solver, std::uint64_t seed, double amp = 1.0,
                            int kmax = 5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const auto& grid = solver.config().grid;
  FourierSpinor c = FourierSpinor::zero(grid);
  for (int i1 = 0; i1 < grid.N1; ++i1)
    for (int i2 = 0; i2 < grid.N2; ++i2) {
      const int j1 = i1 < grid.N1 / 2 ? i1 : i1 - grid.N1;
      const int j2 = i2 < grid.N2 / 2 ? i2 : i2 - grid.N2;
      if (std::abs(j1) > kmax || std::abs(j2) > kmax) continue;
      const size_t idx = 2 * (static_cast<size_t>(i1) * grid.N2 + i2);
      const double damp = amp * std::exp(-0.1 * (j1 * j1 + j2 * j2));
      c.data[idx] = damp * cplx{g(rng), g(rng)};
      c.data[idx + 1] = damp * cplx{g(rng), g(rng)};
    }
  return c;
}

}  // namespace

TEST_CASE("assemble: spectra and projectors") {
  TorusGrid grid;
  grid.N1 = grid.N2 = 16;
  const double eps = 0.37, a = 1.21;
  const auto table = assemble(grid, eps, a);

  // k = 0 mode: eigenvalues +-a, proj_plus = diag(1, 0)
  const ModeSymbol& zero = table[0];
  CHECK(zero.eig_plus == doctest::Approx(a).epsilon(1e-15));
  CHECK(max_abs_diff(zero.proj_plus, Mat2c{1.0, 0.0, 0.0, 0.0}) < 1e-14);

  double min_gap = 1e300;
  for (int i1 = 0; i1 < grid.N1; ++i1)
    for (int i2 = 0; i2 < grid.N2; ++i2) {
      const ModeSymbol& s = table[static_cast<size_t>(i1) * grid.N2 + i2];
      const double mu = std::sqrt(eps * eps * (s.k[0] * s.k[0] + s.k[1] * s.k[1]) + a * a);
      CHECK(std::abs(s.eig_plus - mu) < 1e-12 * mu);
      CHECK(std::abs(s.eig_minus + mu) < 1e-12 * mu);
      CHECK(max_abs_diff(s.proj_plus + s.proj_minus, identity2()) < 1e-12);
      CHECK(max_abs_diff(s.proj_plus * s.proj_minus, Mat2c{}) < 1e-12);
      min_gap = std::min(min_gap, s.eig_plus - s.eig_minus);
    }
  CHECK(min_gap == doctest::Approx(2.0 * a).epsilon(1e-12));  // attained at k = 0

  // antiperiodic spin structure: minimum |eigenvalue| strictly above a
  TorusGrid shifted = grid;
  shifted.delta1 = shifted.delta2 = 0.5;
  const auto table2 = assemble(shifted, eps, a);
  double min_eig = 1e300;
  for (const auto& s : table2) min_eig = std::min(min_eig, s.eig_plus);
  const double k_min = 2.0 * M_PI * 0.5 / grid.L1;
  CHECK(min_eig == doctest::Approx(std::sqrt(a * a + 2.0 * eps * eps * k_min * k_min)).epsilon(1e-12));
  CHECK(min_eig > a);
}

TEST_CASE("transform round trip and Parseval norm") {
  for (double delta : {0.0, 0.5}) {
    SolverConfig cfg = small_config();
    cfg.grid.delta1 = cfg.grid.delta2 = delta;
    TorusSolver solver(cfg);
    FourierSpinor c = random_spinor(solver, 17);
    const FourierSpinor back = solver.to_fourier(solver.to_physical(c));
    double err = 0.0, scale = 0.0;
    for (size_t i = 0; i < c.data.size(); ++i) {
      err = std::max(err, std::abs(c.data[i] - back.data[i]));
      scale = std::max(scale, std::abs(c.data[i]));
    }
    CHECK(err < 1e-12 * scale);
  }

  // single mode k = 0, coefficient (1,0), eps = a = 1, L = 2 pi: norm^2 = 4 pi^2
  SolverConfig cfg = small_config(1.0);
  TorusSolver solver(cfg);
  FourierSpinor c = FourierSpinor::zero(cfg.grid);
  c.data[0] = 1.0;
  CHECK(solver.norm_eps(c) * solver.norm_eps(c) == doctest::Approx(4.0 * M_PI * M_PI).epsilon(1e-13));
}

TEST_CASE("spectral split: completeness, orthogonality, norm additivity") {
  SolverConfig cfg = small_config();
  TorusSolver solver(cfg);
  FourierSpinor c = random_spinor(solver, 5);
  const FourierSpinor cp = solver.project_plus(c);
  const FourierSpinor cm = solver.project_minus(c);

  double err = 0.0;
  for (size_t i = 0; i < c.data.size(); ++i)
    err = std::max(err, std::abs(cp.data[i] + cm.data[i] - c.data[i]));
  CHECK(err < 1e-12);

  FourierSpinor d = random_spinor(solver, 6);
  CHECK(std::abs(solver.inner_eps(cp, solver.project_minus(d))) <
        1e-12 * solver.norm_eps(c) * solver.norm_eps(d));

  const double n2 = solver.norm_eps(c) * solver.norm_eps(c);
  const double np2 = solver.norm_eps(cp) * solver.norm_eps(cp);
  const double nm2 = solver.norm_eps(cm) * solver.norm_eps(cm);
  CHECK(np2 + nm2 == doctest::Approx(n2).epsilon(1e-12));
}

TEST_CASE("energy_L basics and gradient consistency") {
  SolverConfig cfg = small_config();
  TorusSolver solver(cfg);
  CHECK(solver.energy_L(FourierSpinor::zero(cfg.grid)) == 0.0);

  // pure E- field has negative energy
  const FourierSpinor cm = solver.project_minus(random_spinor(solver, 9));
  CHECK(solver.energy_L(cm) < 0.0);

  // directional derivative against central differences
  const FourierSpinor psi = random_spinor(solver, 11, 0.5);
  const FourierSpinor dir = random_spinor(solver, 12, 0.3);
  const FourierSpinor g = solver.grad_L(psi);
  const double analytic = solver.inner_eps(g, dir);
  const double s = 1e-5;
  auto shift = [&](double t) {
    FourierSpinor out = psi;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += t * dir.data[i];
    return out;
  };
  const double fd = (solver.energy_L(shift(s)) - solver.energy_L(shift(-s))) / (2.0 * s);
  CHECK(analytic == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("inner maximization: chi(0) = 0, bound, maximality, concavity") {
  SolverConfig cfg = small_config();
  TorusSolver solver(cfg);

  const auto chi0 = solver.inner_maximize(FourierSpinor::zero(cfg.grid));
  CHECK(solver.norm_eps(chi0.w) == 0.0);

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const FourierSpinor u = solver.project_plus(random_spinor(solver, 100 + trial, 0.8));
    const auto chi = solver.inner_maximize(u);
    // Prop-style bound: ||chi(u)||^2 <= (2/eps^2) int F(|u|)
    const double lhs = solver.norm_eps(chi.w) * solver.norm_eps(chi.w);
    const double rhs = 2.0 * solver.nonlinear_integral(u);
    CHECK(lhs <= rhs * (1.0 + 1e-9) + 1e-12);

    FourierSpinor psi = u;
    for (size_t i = 0; i < psi.data.size(); ++i) psi.data[i] += chi.w.data[i];
    const double L_at_max = solver.energy_L(psi);

    // maximality against random E- perturbations
    std::normal_distribution<double> gd;
    for (int k = 0; k < 5; ++k) {
      FourierSpinor pert = solver.project_minus(random_spinor(solver, 1000 + 20 * trial + k, 0.2));
      FourierSpinor trial_psi = psi;
      for (size_t i = 0; i < trial_psi.data.size(); ++i) trial_psi.data[i] += pert.data[i];
      CHECK(solver.energy_L(trial_psi) <= L_at_max + 1e-10 * std::abs(L_at_max));
    }

    // strict concavity along E- directions through the maximizer
    if (trial < 4) {
      for (int k = 0; k < 5; ++k) {
        FourierSpinor dir = solver.project_minus(random_spinor(solver, 5000 + 20 * trial + k, 1.0));
        const double nd = solver.norm_eps(dir);
        for (size_t i = 0; i < dir.data.size(); ++i) dir.data[i] /= nd;
        const double s = 1e-3;
        auto at = [&](double t) {
          FourierSpinor z = psi;
          for (size_t i = 0; i < z.data.size(); ++i) z.data[i] += t * dir.data[i];
          return solver.energy_L(z);
        };
        const double second = (at(s) - 2.0 * at(0.0) + at(-s)) / (s * s);
        CHECK(second < 0.0);
      }
    }
  }
}

TEST_CASE("reduced functional: I(0) = 0, I >= L, gradient chain rule") {
  SolverConfig cfg = small_config();
  TorusSolver solver(cfg);
  CHECK(solver.reduced_I(FourierSpinor::zero(cfg.grid)) == 0.0);

  const FourierSpinor u = solver.project_plus(random_spinor(solver, 31, 0.7));
  CHECK(solver.reduced_I(u) >= solver.energy_L(u) - 1e-12);

  // E+ gradient of I at u equals P+ grad L(u + chi(u)); check against a
  // finite difference of reduced_I along an E+ direction
  const auto chi = solver.inner_maximize(u);
  FourierSpinor psi = u;
  for (size_t i = 0; i < psi.data.size(); ++i) psi.data[i] += chi.w.data[i];
  const FourierSpinor gI = solver.project_plus(solver.grad_L(psi));
  const FourierSpinor dir = solver.project_plus(random_spinor(solver, 37, 0.4));
  const double analytic = solver.inner_eps(gI, dir);
  const double s = 1e-5;
  auto at = [&](double t) {
    FourierSpinor u2 = u;
    for (size_t i = 0; i < u2.data.size(); ++i) u2.data[i] += t * dir.data[i];
    return solver.reduced_I(u2);
  };
  const double fd = (at(s) - at(-s)) / (2.0 * s);
  CHECK(analytic == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("line maximization: scaling, uniqueness, degenerate input") {
  SolverConfig cfg = small_config();
  TorusSolver solver(cfg);
  const FourierSpinor u = solver.project_plus(random_spinor(solver, 41, 0.6));

  const double t1 = solver.line_max_t(u);
  FourierSpinor u2 = u;
  for (auto& v : u2.data) v *= 2.0;
  const double t2 = solver.line_max_t(u2);
  CHECK(t2 == doctest::Approx(t1 / 2.0).epsilon(1e-6));

  // small-t behavior: I(tu) ~ c t^2 with c > 0
  const double I_a = solver.reduced_I([&] {
    FourierSpinor z = u;
    for (auto& v : z.data) v *= 0.01 * t1;
    return z;
  }());
  CHECK(I_a > 0.0);

  // derivative changes sign exactly once on a logarithmic scan
  FourierSpinor warm = FourierSpinor::zero(cfg.grid);
  int changes = 0;
  double prev = 0.0;
  bool have_prev = false;
  for (int k = 0; k < 50; ++k) {
    const double t = t1 * std::pow(10.0, -1.0 + 2.0 * k / 49.0);
    const double d = solver.line_derivative(t, u, &warm);
    if (have_prev && std::signbit(d) != std::signbit(prev)) ++changes;
    prev = d;
    have_prev = true;
  }
  CHECK(changes == 1);

  CHECK_THROWS_AS(solver.line_max_t(FourierSpinor::zero(cfg.grid)), NoSignChangeError);
}

TEST_CASE("Nehari bound on 20 random fields") {
  SolverConfig cfg = small_config();
  TorusSolver solver(cfg);
  for (int trial = 0; trial < 20; ++trial) {
    const FourierSpinor u = solver.project_plus(random_spinor(solver, 300 + trial, 0.5));
    FourierSpinor warm = FourierSpinor::zero(cfg.grid);
    int changes = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (int k = 0; k < 25; ++k) {
      const double t = std::pow(10.0, -1.5 + 3.0 * k / 24.0);
      const double d = solver.line_derivative(t, u, &warm);
      if (have_prev && std::signbit(d) != std::signbit(prev)) ++changes;
      prev = d;
      have_prev = true;
    }
    CHECK(changes == 1);
  }
}

TEST_CASE("solver converges on a small grid; identities hold") {
  SolverConfig cfg = small_config(0.3, 32);
  cfg.tol_outer = 1e-8;
  TorusSolver solver(cfg);
  const SolveResult res = solver.minimize_nehari();
  CHECK(res.converged);
  CHECK(res.grad_norm < 1e-8);
  CHECK(res.mu_eps > 0.0);
  // mu_eps = eps^{-2} int (1/2 f |psi|^2 - F) at critical points
  CHECK(solver.energy_identity_residual(res.psi, res.mu_eps) < 1e-6);
  // peak stays at the seed center
  CHECK(std::abs(res.loc.peak[0] - M_PI) < 0.3);
  CHECK(std::abs(res.loc.peak[1] - M_PI) < 0.3);
}

TEST_CASE("translation covariance of the peak") {
  SolverConfig cfg = small_config(0.3, 32);
  cfg.seed_center = {M_PI / 2, M_PI};
  TorusSolver solver(cfg);
  const SolveResult res = solver.minimize_nehari();
  CHECK(res.converged);
  CHECK(std::abs(res.loc.peak[0] - M_PI / 2) < 0.3);
  CHECK(std::abs(res.loc.peak[1] - M_PI) < 0.3);
}

TEST_CASE("localization report on a planted exponential") {
  SolverConfig cfg = small_config(0.25, 48);
  TorusSolver solver(cfg);
  FourierSpinor ph = FourierSpinor::zero(cfg.grid, SpinorRep::PHYSICAL);
  const auto& g = cfg.grid;
  for (int i1 = 0; i1 < g.N1; ++i1)
    for (int i2 = 0; i2 < g.N2; ++i2) {
      double d1 = g.L1 * i1 / g.N1 - M_PI;
      double d2 = g.L2 * i2 / g.N2 - M_PI;
      d1 -= g.L1 * std::round(d1 / g.L1);
      d2 -= g.L2 * std::round(d2 / g.L2);
      const double r = std::hypot(d1, d2);
      ph.data[2 * (static_cast<size_t>(i1) * g.N2 + i2)] = std::exp(-r / cfg.eps);
    }
  const LocalizationReport rep = solver.localization_report(ph);
  CHECK(rep.decay_c == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(rep.peak[0] - M_PI) < 1e-12);
  // half-max radius of e^{-r/eps} is eps log 2
  CHECK(rep.width == doctest::Approx(cfg.eps * std::log(2.0)).epsilon(0.35));
}

TEST_CASE("determinism: identical config reproduces bitwise-identical results") {
  SolverConfig cfg = small_config(0.35, 32);
  cfg.seed_mode = SolverConfig::Seed::RANDOM;
  cfg.seed_value = 7;
  TorusSolver s1(cfg), s2(cfg);
  const SolveResult r1 = s1.minimize_nehari();
  const SolveResult r2 = s2.minimize_nehari();
  CHECK(std::memcmp(&r1.mu_eps, &r2.mu_eps, sizeof(double)) == 0);
  REQUIRE(r1.psi.data.size() == r2.psi.data.size());
  CHECK(std::memcmp(r1.psi.data.data(), r2.psi.data.data(),
                    r1.psi.data.size() * sizeof(cplx)) == 0);
}

TEST_CASE("upper-bound inequality around the critical point") {
  // around a critical point psi and a nearby field phi with small gradient,
  // max_t I(t phi+) <= L(phi) + O(||L'(phi)||^2); probe with controlled
  // perturbations and check the quadratic scaling of the excess
  SolverConfig cfg = small_config(0.3, 32);
  TorusSolver solver(cfg);
  const SolveResult res = solver.minimize_nehari();
  REQUIRE(res.converged);

  FourierSpinor xi = random_spinor(solver, 77, 1.0);
  const double nx = solver.norm_eps(xi);
  for (auto& v : xi.data) v /= nx;

  std::vector<double> ratios;
  for (double s : {0.2, 0.1, 0.05}) {
    FourierSpinor phi = res.psi;
    for (size_t i = 0; i < phi.data.size(); ++i) phi.data[i] += s * xi.data[i];
    const double g = solver.norm_eps(solver.grad_L(phi));
    REQUIRE(g > 0.0);
    FourierSpinor phip = solver.project_plus(phi);
    FourierSpinor warm = FourierSpinor::zero(cfg.grid);
    const double t_star = solver.line_max_t(phip, &warm);
    FourierSpinor tphip = phip;
    for (auto& v : tphip.data) v *= t_star;
    const double lhs = solver.reduced_I(tphip) - solver.energy_L(phi);
    ratios.push_back(lhs / (g * g));
    CHECK(lhs <= 50.0 * g * g);
  }
  // quadratic order: the excess-to-g^2 ratio stays bounded as s shrinks
  const double rmax = *std::max_element(ratios.begin(), ratios.end());
  const double rmin = *std::min_element(ratios.begin(), ratios.end());
  CHECK(rmax - rmin < 50.0);
  CHECK(rmax < 50.0);
}

TEST_CASE("antiperiodic spin structure solves") {
  SolverConfig cfg = small_config(0.3, 32);
  cfg.grid.delta1 = cfg.grid.delta2 = 0.5;
  TorusSolver solver(cfg);
  const SolveResult res = solver.minimize_nehari();
  CHECK(res.converged);
  CHECK(res.mu_eps > 0.0);
  CHECK(solver.energy_identity_residual(res.psi, res.mu_eps) < 1e-6);
}

TEST_CASE("config validation") {
  SolverConfig cfg = small_config();
  cfg.p = 4.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.grid.N1 = 12;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.grid.delta1 = 0.3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

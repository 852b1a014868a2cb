#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "syl/bubble.hpp"
#include "support/collocation.hpp"

using namespace syl;

namespace {
// shared ground state for the (lambda=1, p=3, S=0) reference case
const GroundState& reference_state() {
  static const GroundState gs = find_ground_state({});
  return gs;
}

RadialProfile synthetic_exponential(double rate, double r_max = 30.0, size_t n = 6001) {
  // rho(r) = e^{-rate r} with all mass in v
  RadialProfile prof;
  prof.params = {};
  prof.params.r_max = r_max;
  prof.r.resize(n);
  prof.u.assign(n, 0.0);
  prof.v.resize(n);
  const double h = r_max / static_cast<double>(n - 1);
  for (size_t i = 0; i < n; ++i) {
    prof.r[i] = i * h;
    prof.v[i] = std::exp(-rate * prof.r[i]);
  }
  return prof;
}
}  // namespace

TEST_CASE("radial_rhs matches the polar system") {
  BubbleParams prm;
  auto [du, dv] = radial_rhs(1.0, 0.0, 0.0, prm);
  CHECK(du == 0.0);
  CHECK(dv == 0.0);

  // S = 0 linearized tail: du ~ -u/r + lambda v, dv ~ lambda u
  auto [du2, dv2] = radial_rhs(2.0, 1e-9, 2e-9, prm);
  CHECK(du2 == doctest::Approx(-1e-9 / 2.0 + 1.0 * 2e-9).epsilon(1e-5));
  CHECK(dv2 == doctest::Approx(1.0 * 1e-9).epsilon(1e-5));

  CHECK_THROWS_AS(radial_rhs(0.0, 0.1, 0.1, prm), std::domain_error);
}

TEST_CASE("shoot classifications") {
  BubbleParams prm;
  // trivial
  Trajectory z = shoot(0.0, prm);
  CHECK(z.cls == ShotClass::DECAYS);

  // far below the separatrix: spiral capture
  Trajectory lo = shoot(0.3, prm);
  CHECK(lo.cls == ShotClass::U_DOMINATES);

  // far above: v plunges through zero
  Trajectory hi = shoot(50.0, prm);
  CHECK(hi.cls == ShotClass::V_CROSSES_ZERO);
  CHECK_FALSE(hi.integration_failed);
}

TEST_CASE("ground state lambda=1 p=3: frozen oracle values") {
  const auto& gs = reference_state();
  // Values frozen from two independent solvers (shooting + collocation),
  // which agree to 9+ digits.
  CHECK(gs.report.v0_star == doctest::Approx(2.653104544).epsilon(2e-7));
  CHECK(gs.report.mu0 == doctest::Approx(3.673522612).epsilon(2e-7));
  CHECK(gs.report.mu0 > 0.0);
  CHECK(gs.report.residual_2d < 1e-6);
  CHECK(gs.report.decay_rate > 0.0);
  CHECK(gs.report.decay_rate <= 2.0 * gs.profile.params.lambda);
  CHECK(gs.report.moments.I_p0 == doctest::Approx(3.50795569).epsilon(1e-5));
  CHECK(gs.report.moments.I_p2 == doctest::Approx(1.80721284).epsilon(1e-4));

  // u(0) = 0; zero-node structure: v > 0 everywhere, u <= 0 everywhere
  CHECK(gs.profile.u.front() == 0.0);
  for (size_t i = 0; i < gs.profile.r.size(); ++i) {
    CHECK(gs.profile.v[i] > 0.0);
    CHECK(gs.profile.u[i] <= 1e-12);
  }
  // |psi| attains its max at the origin and decreases
  double prev = 1e300;
  bool monotone = true;
  for (size_t i = 0; i < gs.profile.r.size(); ++i) {
    const double rho = std::hypot(gs.profile.u[i], gs.profile.v[i]);
    if (rho > prev + 1e-12) monotone = false;
    prev = rho;
  }
  CHECK(monotone);
}

TEST_CASE("critical-point energy identity") {
  const auto& gs = reference_state();
  const double e_crit = energy(gs.profile);
  const double e_def = energy_from_definition(gs.profile);
  CHECK(std::abs(e_def - e_crit) / e_crit < 1e-8);
}

TEST_CASE("energy identity fails for non-solutions") {
  // a plausible-looking profile that does not solve the system
  RadialProfile fake = synthetic_exponential(1.0);
  const double e_crit = energy(fake);
  const double e_def = energy_from_definition(fake);
  CHECK(std::abs(e_def - e_crit) / e_crit > 1e-3);
}

TEST_CASE("full_residual: oracle for the radial reduction") {
  const auto& gs = reference_state();
  CHECK(full_residual(gs.profile) < 1e-7);

  // negative control: swapping u and v breaks the equation at O(1)
  RadialProfile swapped = gs.profile;
  std::swap(swapped.u, swapped.v);
  CHECK(full_residual(swapped) > 0.05);

  // zero profile: guarded
  RadialProfile zero = gs.profile;
  std::fill(zero.u.begin(), zero.u.end(), 0.0);
  std::fill(zero.v.begin(), zero.v.end(), 0.0);
  bool flag = false;
  CHECK(full_residual(zero, &flag) == 0.0);
  CHECK(flag);
}

TEST_CASE("decay_fit on synthetic exponential") {
  RadialProfile prof = synthetic_exponential(1.0);
  CHECK(decay_fit(prof) == doctest::Approx(1.0).epsilon(1e-6));

  RadialProfile prof2 = synthetic_exponential(2.0, 20.0);
  CHECK(decay_fit(prof2) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("moment integrals against Gamma closed forms") {
  // rho = e^{-r}, p = 3: int rho^3 r dr = 1/9, int rho^3 r^3 dr = 6/81
  RadialProfile prof = synthetic_exponential(1.0);
  const Moments m = moment_integrals(prof);
  CHECK(m.I_p0 == doctest::Approx(1.0 / 9.0).epsilon(1e-8));
  CHECK(m.I_p2 == doctest::Approx(6.0 / 81.0).epsilon(1e-8));
}

TEST_CASE("moments stable under grid halving") {
  const auto& gs = reference_state();
  const Moments m = moment_integrals(gs.profile);
  RadialProfile half = gs.profile;
  // drop every other sample
  std::vector<double> r2, u2, v2;
  for (size_t i = 0; i < gs.profile.r.size(); i += 2) {
    r2.push_back(gs.profile.r[i]);
    u2.push_back(gs.profile.u[i]);
    v2.push_back(gs.profile.v[i]);
  }
  half.r = r2;
  half.u = u2;
  half.v = v2;
  const Moments mh = moment_integrals(half);
  CHECK(std::abs(mh.I_p0 - m.I_p0) / m.I_p0 < 1e-3);
  CHECK(std::abs(mh.I_p2 - m.I_p2) / m.I_p2 < 1e-3);
}

TEST_CASE("lambda scaling law at p = 3") {
  const auto& gs1 = reference_state();
  BubbleParams prm2;
  prm2.lambda = 2.0;
  const GroundState gs2 = find_ground_state(prm2);

  // mu0(2) = 2 mu0(1), v0*(2) = 2 v0*(1)
  CHECK(gs2.report.mu0 == doctest::Approx(2.0 * gs1.report.mu0).epsilon(1e-6));
  CHECK(gs2.report.v0_star == doctest::Approx(2.0 * gs1.report.v0_star).epsilon(1e-6));
  // fitted decay rate approximately doubles
  CHECK(gs2.report.decay_rate == doctest::Approx(2.0 * gs1.report.decay_rate).epsilon(0.05));

  // the scaling map sends the lambda=1 profile to the lambda=2 one
  const RadialProfile mapped = scale_profile(gs1.profile, 2.0);
  CHECK(energy(mapped) == doctest::Approx(gs2.report.mu0).epsilon(1e-6));
  // scaling at lambda = 1 is the identity
  const RadialProfile same = scale_profile(gs1.profile, 1.0);
  CHECK(same.r.back() == gs1.profile.r.back());
  CHECK(same.v[10] == gs1.profile.v[10]);
}

TEST_CASE("shooting vs collocation oracle") {
  const auto& gs = reference_state();
  const auto oracle = syl::oracle::solve_ground_state(1.0, 3.0);
  REQUIRE(oracle.converged);
  CHECK(std::abs(oracle.mu0 - gs.report.mu0) / gs.report.mu0 < 1e-6);
  CHECK(std::abs(oracle.v0 - gs.report.v0_star) / gs.report.v0_star < 1e-6);
}

TEST_CASE("Pohozaev-type identity pins the cross moment") {
  // int u v r^2 dr = -(1 / 2 lambda) int v^2 r dr for decaying solutions
  const auto& gs = reference_state();
  const auto& r = gs.profile.r;
  const double h = r[1] - r[0];
  double uv2 = 0.0, v2r = 0.0;
  for (size_t i = 1; i < r.size(); ++i) {
    uv2 += h * gs.profile.u[i] * gs.profile.v[i] * r[i] * r[i];
    v2r += h * gs.profile.v[i] * gs.profile.v[i] * r[i];
  }
  CHECK(uv2 == doctest::Approx(-v2r / 2.0).epsilon(1e-5));
}

TEST_CASE("parameter validation") {
  BubbleParams bad;
  bad.p = 5.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.lambda = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.S = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

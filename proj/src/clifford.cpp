#include "syl/clifford.hpp"

#include <cmath>
#include <stdexcept>

namespace syl {

CliffordRep2 make_clifford() {
  const cplx i{0.0, 1.0};
  CliffordRep2 rep;
  rep.gamma1 = {0.0, i, i, 0.0};
  rep.gamma2 = {0.0, 1.0, -1.0, 0.0};
  rep.gamma3 = {1.0, 0.0, 0.0, -1.0};
  return rep;
}

const CliffordRep2& pauli_rep() {
  static const CliffordRep2 rep = make_clifford();
  return rep;
}

Vec2c clifford_mul(const std::array<double, 2>& X, const Vec2c& zeta) {
  // (X1 g1 + X2 g2) zeta = [0, i X1 + X2; i X1 - X2, 0] zeta
  const cplx top{X[1], X[0]};   // X2 + i X1
  const cplx bot{-X[1], X[0]};  // -X2 + i X1
  return {top * zeta.b, bot * zeta.a};
}

ModeSymbol dirac_symbol(const std::array<double, 2>& k, double eps, double a) {
  if (!(eps > 0.0) || !(a > 0.0)) throw std::invalid_argument("dirac_symbol: need eps > 0, a > 0");
  ModeSymbol s;
  s.k = k;
  // i eps (k1 g1 + k2 g2) + a g3 = [a, -eps k1 + i eps k2; -eps k1 - i eps k2, -a]
  const cplx b{-eps * k[0], eps * k[1]};
  s.matrix = {a, b, std::conj(b), -a};
  const double mu = std::sqrt(a * a + eps * eps * (k[0] * k[0] + k[1] * k[1]));
  s.eig_minus = -mu;
  s.eig_plus = mu;
  const Mat2c scaled = s.matrix * (1.0 / mu);
  s.proj_plus = (identity2() + scaled) * 0.5;
  s.proj_minus = (identity2() - scaled) * 0.5;
  return s;
}

}  // namespace syl

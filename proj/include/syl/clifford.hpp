#ifndef SYL_CLIFFORD_HPP
#define SYL_CLIFFORD_HPP

#include <array>

#include "syl/c2.hpp"

// 2D Clifford algebra in the fixed Pauli-type representation
//
//   g1 = [0  i; i  0],  g2 = [0 1; -1 0],  g3 = i g1 g2 = diag(1, -1),
//
// together with the Fourier-mode symbol of the operator eps*D + a*g3 and its
// spectral projectors. All other modules use this single representation so
// that grid data stays comparable.

namespace syl {

struct CliffordRep2 {
  Mat2c gamma1, gamma2, gamma3;
};

// The representation printed above; gamma3 is the chirality operator.
CliffordRep2 make_clifford();

// Shared immutable instance.
const CliffordRep2& pauli_rep();

// Clifford multiplication (X1 g1 + X2 g2) zeta by a real tangent vector X.
Vec2c clifford_mul(const std::array<double, 2>& X, const Vec2c& zeta);

// Fourier symbol of A_eps = eps*D + a*g3 at wavevector k:
//   matrix = i eps (k1 g1 + k2 g2) + a g3,  Hermitian,
//   eigenvalues -mu, +mu with mu = sqrt(eps^2 |k|^2 + a^2).
// The projectors are rank-1, orthogonal, and sum to the identity; they are
// obtained in closed form as (I -+ matrix/mu)/2 (the spectral gap is >= 2a,
// so the eigenvalues never collide).
struct ModeSymbol {
  std::array<double, 2> k{0.0, 0.0};
  Mat2c matrix;
  double eig_minus = 0.0;  // -mu(k)
  double eig_plus = 0.0;   // +mu(k)
  Mat2c proj_minus;
  Mat2c proj_plus;
};

ModeSymbol dirac_symbol(const std::array<double, 2>& k, double eps, double a);

}  // namespace syl

#endif

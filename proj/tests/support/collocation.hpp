#ifndef SYL_TESTS_COLLOCATION_HPP
#define SYL_TESTS_COLLOCATION_HPP

// Independent oracle for the radial ground state: midpoint (box) collocation
// of the radial system on [r0, R] with a Robin tail condition built from the
// K-Bessel decay ratio, solved by damped Newton on a banded Jacobian and
// Richardson-extrapolated in the mesh width. Shares nothing with the shooting
// path in src/bubble.cpp.

#include <vector>

namespace syl::oracle {

struct CollocationResult {
  double v0 = 0.0;     // v at the origin (Richardson-extrapolated)
  double mu0 = 0.0;    // critical-point energy
  bool converged = false;
  std::vector<double> r, u, v;  // finest-mesh solution
};

CollocationResult solve_ground_state(double lambda, double p, int n_coarse = 2000,
                                     double R = 0.0);

}  // namespace syl::oracle

#endif

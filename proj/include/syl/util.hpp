#ifndef SYL_UTIL_HPP
#define SYL_UTIL_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace syl {

// Composite Simpson on a uniform grid; falls back to a trapezoid panel when
// the interval count is odd.
inline double simpson_uniform(std::span<const double> y, double h) {
  const size_t n = y.size();
  if (n < 2) return 0.0;
  size_t m = n - 1;  // intervals
  double s = 0.0;
  size_t pairs = m / 2;
  for (size_t i = 0; i + 2 <= 2 * pairs + 1; i += 2) {
    if (i + 2 >= n) break;
    s += (h / 3.0) * (y[i] + 4.0 * y[i + 1] + y[i + 2]);
  }
  if (m % 2 == 1) s += 0.5 * h * (y[n - 2] + y[n - 1]);
  return s;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: bad sizes");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += e * e;
  }
  double ss_tot = syy - sy * sy / n;
  f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

// 4th-order first derivative of samples on a uniform grid (one-sided stencils
// at the ends).
inline std::vector<double> fd_derivative4(std::span<const double> y, double h) {
  const size_t n = y.size();
  if (n < 6) throw std::invalid_argument("fd_derivative4: need >= 6 samples");
  std::vector<double> d(n);
  for (size_t i = 2; i + 2 < n; ++i)
    d[i] = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h);
  auto one_sided = [&](size_t i, int sgn) {
    // 5-point forward/backward stencil, O(h^4)
    auto Y = [&](int k) {
      return y[static_cast<size_t>(static_cast<std::ptrdiff_t>(i) + sgn * k)];
    };
    return sgn * (-25.0 * Y(0) + 48.0 * Y(1) - 36.0 * Y(2) + 16.0 * Y(3) - 3.0 * Y(4)) / (12.0 * h);
  };
  d[0] = one_sided(0, 1);
  d[1] = one_sided(1, 1);
  d[n - 1] = one_sided(n - 1, -1);
  d[n - 2] = one_sided(n - 2, -1);
  return d;
}

}  // namespace syl

#endif

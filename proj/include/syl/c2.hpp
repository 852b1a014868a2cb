#ifndef SYL_C2_HPP
#define SYL_C2_HPP

#include <array>
#include <cmath>
#include <complex>

// Minimal complex 2-vector / 2x2 matrix algebra. Everything here is a plain
// value type; no dynamic allocation.

namespace syl {

using cplx = std::complex<double>;

struct Vec2c {
  cplx a{0.0, 0.0};
  cplx b{0.0, 0.0};

  Vec2c operator+(const Vec2c& o) const { return {a + o.a, b + o.b}; }
  Vec2c operator-(const Vec2c& o) const { return {a - o.a, b - o.b}; }
  Vec2c operator*(cplx s) const { return {a * s, b * s}; }
  Vec2c operator*(double s) const { return {a * s, b * s}; }
};

inline Vec2c operator*(cplx s, const Vec2c& v) { return v * s; }
inline Vec2c operator*(double s, const Vec2c& v) { return v * s; }

// Hermitian pairing (x, y) = x_1 conj(y_1) + x_2 conj(y_2).
inline cplx inner(const Vec2c& x, const Vec2c& y) {
  return x.a * std::conj(y.a) + x.b * std::conj(y.b);
}

inline double norm2(const Vec2c& x) { return std::norm(x.a) + std::norm(x.b); }
inline double norm(const Vec2c& x) { return std::sqrt(norm2(x)); }

struct Mat2c {
  // row-major: [m00 m01; m10 m11]
  cplx m00{0.0}, m01{0.0}, m10{0.0}, m11{0.0};

  Mat2c operator+(const Mat2c& o) const {
    return {m00 + o.m00, m01 + o.m01, m10 + o.m10, m11 + o.m11};
  }
  Mat2c operator-(const Mat2c& o) const {
    return {m00 - o.m00, m01 - o.m01, m10 - o.m10, m11 - o.m11};
  }
  Mat2c operator*(cplx s) const { return {m00 * s, m01 * s, m10 * s, m11 * s}; }
  Mat2c operator*(double s) const { return {m00 * s, m01 * s, m10 * s, m11 * s}; }
  Mat2c operator*(const Mat2c& o) const {
    return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
            m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
  }
  Vec2c operator*(const Vec2c& v) const {
    return {m00 * v.a + m01 * v.b, m10 * v.a + m11 * v.b};
  }

  Mat2c adjoint() const {
    return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
  }
  cplx trace() const { return m00 + m11; }
  cplx det() const { return m00 * m11 - m01 * m10; }
};

inline Mat2c operator*(cplx s, const Mat2c& m) { return m * s; }
inline Mat2c operator*(double s, const Mat2c& m) { return m * s; }

inline Mat2c identity2() { return {1.0, 0.0, 0.0, 1.0}; }

// max abs entry of (x - y), for tolerance checks
inline double max_abs_diff(const Mat2c& x, const Mat2c& y) {
  double d = std::abs(x.m00 - y.m00);
  d = std::max(d, std::abs(x.m01 - y.m01));
  d = std::max(d, std::abs(x.m10 - y.m10));
  d = std::max(d, std::abs(x.m11 - y.m11));
  return d;
}

}  // namespace syl

#endif

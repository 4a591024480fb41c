#pragma once

#include <Eigen/Dense>
#include <complex>

namespace edgematch {

using Vec2 = Eigen::Vector2d;

// Rotate a vector counter-clockwise by a quarter turn.
inline Vec2 rot_ccw90(const Vec2& v) { return Vec2(-v.y(), v.x()); }
inline Vec2 rot_cw90(const Vec2& v) { return Vec2(v.y(), -v.x()); }

inline Vec2 rotate(const Vec2& v, double radians) {
  const double c = std::cos(radians), s = std::sin(radians);
  return Vec2(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

inline std::complex<double> to_complex(const Vec2& v) { return {v.x(), v.y()}; }
inline Vec2 from_complex(const std::complex<double>& z) { return Vec2(z.real(), z.imag()); }

}  // namespace edgematch

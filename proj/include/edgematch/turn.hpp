#pragma once

#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "edgematch/vec.hpp"

namespace edgematch {

// Exact fraction of a full turn, reduced and normalized into [0, 1).
// Angles are matched combinatorially, so they are never compared as floats.
struct Turn {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Turn() = default;
  Turn(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::invalid_argument("Turn: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    n %= d;
    if (n < 0) n += d;
    const std::int64_t g = std::gcd(n, d);
    num = n / g;
    den = d / g;
  }

  static Turn zero() { return Turn(); }
  static Turn half() { return Turn(1, 2); }

  Turn operator+(const Turn& o) const { return Turn(num * o.den + o.num * den, den * o.den); }
  Turn operator-(const Turn& o) const { return Turn(num * o.den - o.num * den, den * o.den); }
  Turn operator-() const { return Turn(-num, den); }
  Turn opposite() const { return *this + half(); }

  bool operator==(const Turn& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Turn& o) const { return !(*this == o); }
  bool operator<(const Turn& o) const { return num * o.den < o.num * den; }

  // True when the angle lies in [0, 1/2).
  bool in_lower_half() const { return 2 * num < den; }

  double radians() const { return 2.0 * std::numbers::pi * double(num) / double(den); }
  Vec2 unit() const { return Vec2(std::cos(radians()), std::sin(radians())); }

  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

}  // namespace edgematch

#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace sigroute {

// Exact value in (1/2)Z, stored as twice the value. Routing thresholds are
// midpoints of integer bounds, so this is closed under everything we need and
// comparisons against queue lengths are exact.
class HalfInteger {
 public:
  constexpr HalfInteger() = default;

  static constexpr HalfInteger from_twice(std::int64_t twice) {
    HalfInteger h;
    h.twice_ = twice;
    return h;
  }
  static constexpr HalfInteger from_int(std::int64_t v) { return from_twice(2 * v); }
  static constexpr HalfInteger midpoint(std::int64_t a, std::int64_t b) {
    return from_twice(a + b);
  }

  constexpr std::int64_t twice() const { return twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  // Smallest integer >= value.
  constexpr std::int64_t ceil() const {
    return twice_ >= 0 ? (twice_ + 1) / 2 : -((-twice_) / 2);
  }
  constexpr std::int64_t floor() const {
    return twice_ >= 0 ? twice_ / 2 : -((-twice_ + 1) / 2);
  }
  constexpr double to_double() const { return static_cast<double>(twice_) / 2.0; }

  // Decimal rendering: "3", "3.5", "-0.5".
  std::string to_string() const {
    if (is_integer()) return std::to_string(twice_ / 2);
    std::int64_t whole = twice_ / 2;
    std::string s = std::to_string(whole < 0 ? -whole : whole) + ".5";
    return twice_ < 0 ? "-" + s : s;
  }

  friend constexpr auto operator<=>(HalfInteger, HalfInteger) = default;

  // Integer comparisons, exact.
  friend constexpr bool operator>=(std::int64_t x, HalfInteger h) { return 2 * x >= h.twice_; }
  friend constexpr bool operator<(std::int64_t x, HalfInteger h) { return 2 * x < h.twice_; }

 private:
  std::int64_t twice_ = 0;
};

}  // namespace sigroute

#pragma once

#include <compare>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <string>

namespace superbroadcast {

/// Spin value stored as twice its value, so 3/2 is held as 3.
///
/// Magnitudes (j, l, J) are non-negative; projections (m, n) may be negative.
class HalfInt {
public:
  constexpr HalfInt() = default;

  static constexpr HalfInt from_doubled(int doubled) { return HalfInt(doubled); }
  static constexpr HalfInt from_int(int value) { return HalfInt(2 * value); }

  constexpr int doubled() const { return doubled_; }
  constexpr bool is_integer() const { return doubled_ % 2 == 0; }
  constexpr double value() const { return 0.5 * doubled_; }

  /// Number of states 2x+1 of a multiplet with this spin.
  constexpr int dimension() const { return doubled_ + 1; }

  constexpr HalfInt abs() const { return HalfInt(doubled_ < 0 ? -doubled_ : doubled_); }

  constexpr HalfInt operator-() const { return HalfInt(-doubled_); }
  constexpr HalfInt operator+(HalfInt o) const { return HalfInt(doubled_ + o.doubled_); }
  constexpr HalfInt operator-(HalfInt o) const { return HalfInt(doubled_ - o.doubled_); }
  constexpr HalfInt& operator+=(HalfInt o) {
    doubled_ += o.doubled_;
    return *this;
  }
  constexpr HalfInt& operator-=(HalfInt o) {
    doubled_ -= o.doubled_;
    return *this;
  }

  constexpr auto operator<=>(const HalfInt&) const = default;

  /// "3/2", "-1/2", "2".
  std::string str() const {
    if (is_integer()) return std::to_string(doubled_ / 2);
    return std::to_string(doubled_) + "/2";
  }

private:
  constexpr explicit HalfInt(int doubled) : doubled_(doubled) {}
  int doubled_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, HalfInt h) { return os << h.str(); }

/// True when a and b differ by an integer.
constexpr bool same_parity(HalfInt a, HalfInt b) {
  return ((a.doubled() - b.doubled()) % 2) == 0;
}

namespace literals {
/// 3_h2 == HalfInt::from_doubled(3), i.e. spin 3/2.
constexpr HalfInt operator""_h2(unsigned long long doubled) {
  return HalfInt::from_doubled(static_cast<int>(doubled));
}
}  // namespace literals

}  // namespace superbroadcast

template <>
struct std::hash<superbroadcast::HalfInt> {
  std::size_t operator()(superbroadcast::HalfInt h) const noexcept {
    return std::hash<int>{}(h.doubled());
  }
};

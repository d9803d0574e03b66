#pragma once

#include <compare>
#include <ostream>

namespace nlch {

/// A real number or +infinity. The infinite value is a flag, never a
/// floating-point overflow, so "singular" and "very large" stay distinct.
class ExtendedReal {
 public:
  constexpr ExtendedReal(double v = 0.0) : value_(v), infinite_(false) {}  // NOLINT

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }

  /// Finite value; meaningless when is_infinite().
  constexpr double value() const { return value_; }

  friend constexpr ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return ExtendedReal(a.value_ + b.value_);
  }

  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

  friend constexpr std::partial_ordering operator<=>(ExtendedReal a, ExtendedReal b) {
    if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
    if (a.infinite_) return std::partial_ordering::greater;
    if (b.infinite_) return std::partial_ordering::less;
    return a.value_ <=> b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, ExtendedReal r) {
    if (r.infinite_) return os << "+inf";
    return os << r.value_;
  }

 private:
  double value_;
  bool infinite_;
};

}  // namespace nlch

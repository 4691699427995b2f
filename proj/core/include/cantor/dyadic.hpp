// Dyadic distance values 2^-j (plus 0), the only distances the one-sided
// binary metric d(x,y) = 2^-(first disagreement index) can take. All
// arithmetic is exact on exponents. The metric is an ultrametric:
// d(x,z) <= max(d(x,y), d(y,z)); Dyadic::max_of is the tight triangle bound,
// sum_upper the conventional (lossier) one.
#pragma once

#include <compare>
#include <optional>
#include <string>

namespace cantor {

class Dyadic {
 public:
  constexpr Dyadic() : zero_(true), exp_(0) {}

  static constexpr Dyadic zero() { return Dyadic(); }
  static constexpr Dyadic one() { return pow2(0); }
  // value 2^-j; j may be negative for intermediate bounds (> 1)
  static constexpr Dyadic pow2(int j) {
    Dyadic d;
    d.zero_ = false;
    d.exp_ = j;
    return d;
  }

  constexpr bool is_zero() const { return zero_; }
  // only meaningful when !is_zero()
  constexpr int exponent() const { return exp_; }

  constexpr Dyadic half() const { return zero_ ? *this : pow2(exp_ + 1); }
  constexpr Dyadic twice() const { return zero_ ? *this : pow2(exp_ - 1); }

  friend constexpr bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.zero_ == b.zero_ && (a.zero_ || a.exp_ == b.exp_);
  }
  friend constexpr bool operator<(const Dyadic& a, const Dyadic& b) {
    if (a.zero_) return !b.zero_;
    if (b.zero_) return false;
    return a.exp_ > b.exp_;
  }
  friend constexpr bool operator<=(const Dyadic& a, const Dyadic& b) {
    return a == b || a < b;
  }
  friend constexpr bool operator>(const Dyadic& a, const Dyadic& b) { return b < a; }
  friend constexpr bool operator>=(const Dyadic& a, const Dyadic& b) { return b <= a; }

  static constexpr Dyadic max_of(const Dyadic& a, const Dyadic& b) {
    return a < b ? b : a;
  }
  // smallest dyadic guaranteed >= a + b
  static constexpr Dyadic sum_upper(const Dyadic& a, const Dyadic& b) {
    if (a.zero_) return b;
    if (b.zero_) return a;
    return pow2((a.exp_ < b.exp_ ? a.exp_ : b.exp_) - 1);
  }

  std::string str() const;
  double approx() const;
  static std::optional<Dyadic> parse(const std::string& s);

 private:
  bool zero_;
  int exp_;
};

}  // namespace cantor

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "bearraid/money.hpp"

namespace bearraid {

/// Exact fraction over 128-bit integers, always stored in lowest terms with a
/// positive denominator.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(int128 num, int128 den = 1) : num_(num), den_(den) {
    if (den_ == 0) throw std::domain_error("zero denominator");
    normalize();
  }

  /// mantissa * 10^exponent, e.g. (2, -5) is 2e-5.
  static Rational scientific(std::int64_t mantissa, int exponent) {
    int128 scale = 1;
    for (int i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) scale *= 10;
    return exponent < 0 ? Rational(mantissa, scale) : Rational(static_cast<int128>(mantissa) * scale);
  }

  int128 num() const { return num_; }
  int128 den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

 private:
  static int128 gcd(int128 a, int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    int128 g = gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  int128 num_ = 0;
  int128 den_ = 1;
};

}  // namespace bearraid

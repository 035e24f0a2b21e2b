#pragma once

#include <cstdint>
#include <cmath>
#include <compare>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <string>

#include "hosc/errors.hpp"

namespace hosc {

/// Exact rational of the form num / 2^log2_den, kept normalized
/// (num odd, or num == 0 with log2_den == 0).
class Dyadic {
 public:
  constexpr Dyadic() = default;
  constexpr Dyadic(std::int64_t num, int log2_den = 0) : num_(num), log2_den_(log2_den) {
    normalize();
  }

  constexpr std::int64_t numerator() const { return num_; }
  constexpr int log2_denominator() const { return log2_den_; }
  constexpr bool is_zero() const { return num_ == 0; }

  double to_double() const { return std::ldexp(static_cast<double>(num_), -log2_den_); }

  friend constexpr Dyadic operator+(Dyadic a, Dyadic b) {
    const int d = a.log2_den_ > b.log2_den_ ? a.log2_den_ : b.log2_den_;
    return Dyadic(a.num_ * pow2(d - a.log2_den_) + b.num_ * pow2(d - b.log2_den_), d);
  }
  friend constexpr Dyadic operator-(Dyadic a) { return Dyadic(-a.num_, a.log2_den_); }
  friend constexpr Dyadic operator-(Dyadic a, Dyadic b) { return a + (-b); }
  friend constexpr Dyadic operator*(Dyadic a, Dyadic b) {
    return Dyadic(a.num_ * b.num_, a.log2_den_ + b.log2_den_);
  }
  Dyadic& operator+=(Dyadic o) { return *this = *this + o; }
  Dyadic& operator-=(Dyadic o) { return *this = *this - o; }

  friend constexpr bool operator==(const Dyadic&, const Dyadic&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Dyadic& d) {
    os << d.num_;
    if (d.log2_den_ > 0) os << "/" << (std::int64_t{1} << d.log2_den_);
    return os;
  }

 private:
  static constexpr std::int64_t pow2(int e) { return std::int64_t{1} << e; }

  constexpr void normalize() {
    if (num_ == 0) {
      log2_den_ = 0;
      return;
    }
    while (log2_den_ > 0 && (num_ % 2) == 0) {
      num_ /= 2;
      --log2_den_;
    }
    while (log2_den_ < 0) {
      num_ *= 2;
      ++log2_den_;
    }
  }

  std::int64_t num_ = 0;
  int log2_den_ = 0;
};

}  // namespace hosc

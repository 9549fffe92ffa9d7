#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "axp/errors.hpp"

namespace axp {

/// Exact rational arithmetic for importance scores. Numerators and
/// denominators stay tiny (bounded by explanation counts and set sizes),
/// so int64 with gcd reduction is plenty; intermediates use __int128.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den) {
    if (den_ == 0) throw ValidationError("rational: zero denominator");
    reduce();
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                   i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                   i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ValidationError("rational: division by zero");
    return from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return a == b || a < b; }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// "5/6", or "2" when integral.
  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  using i128 = __int128;

  static Rational from128(i128 num, i128 den) {
    if (den < 0) { num = -num; den = -den; }
    i128 g = gcd128(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
    Rational r;
    r.num_ = checked64(num);
    r.den_ = checked64(den);
    return r;
  }
  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) { i128 t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }
  static std::int64_t checked64(i128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw ValidationError("rational: overflow");
    return static_cast<std::int64_t>(v);
  }
  void reduce() {
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Rounds to the nearest multiple of 1/1000, ties to even. This is the
/// convention under which 1/16 prints as 0.062 rather than 0.063.
inline Rational round3(const Rational& r) {
  bool neg = r.num() < 0;
  std::int64_t p = neg ? -r.num() : r.num();
  std::int64_t q = r.den();
  __int128 scaled = static_cast<__int128>(p) * 1000;
  std::int64_t k = static_cast<std::int64_t>(scaled / q);
  std::int64_t rem = static_cast<std::int64_t>(scaled % q);
  if (2 * rem > q || (2 * rem == q && (k % 2) != 0)) ++k;
  return Rational(neg ? -k : k, 1000);
}

/// Fixed three-decimal rendering of round3(r), e.g. "0.333", "1.000".
inline std::string format3(const Rational& r) {
  Rational k3 = round3(r);
  std::int64_t milli = k3.num() * (1000 / k3.den());
  bool neg = milli < 0;
  if (neg) milli = -milli;
  std::string frac = std::to_string(milli % 1000);
  frac.insert(0, 3 - frac.size(), '0');
  return (neg ? "-" : "") + std::to_string(milli / 1000) + "." + frac;
}

}  // namespace axp

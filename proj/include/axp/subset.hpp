#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "axp/errors.hpp"

namespace axp {

/// A set of feature indices in {0..n-1}, canonically represented as a
/// bitmask. Supports at most 63 features, far beyond desk scale.
class FeatureSubset {
 public:
  constexpr FeatureSubset() = default;
  explicit constexpr FeatureSubset(std::uint64_t bits) : bits_(bits) {}

  static FeatureSubset of(std::initializer_list<int> members) {
    FeatureSubset s;
    for (int i : members) s = s.with(i);
    return s;
  }
  static FeatureSubset full(int n) {
    check_index(n == 0 ? 0 : n - 1);
    return FeatureSubset(n == 0 ? 0 : (~std::uint64_t{0} >> (64 - n)));
  }

  std::uint64_t bits() const { return bits_; }
  bool empty() const { return bits_ == 0; }
  int count() const { return std::popcount(bits_); }
  bool contains(int i) const { return (bits_ >> i) & 1u; }

  FeatureSubset with(int i) const { check_index(i); return FeatureSubset(bits_ | (std::uint64_t{1} << i)); }
  FeatureSubset without(int i) const { check_index(i); return FeatureSubset(bits_ & ~(std::uint64_t{1} << i)); }

  FeatureSubset union_with(FeatureSubset o) const { return FeatureSubset(bits_ | o.bits_); }
  FeatureSubset intersect(FeatureSubset o) const { return FeatureSubset(bits_ & o.bits_); }
  FeatureSubset complement_in(int n) const { return FeatureSubset(full(n).bits_ & ~bits_); }

  bool subset_of(FeatureSubset o) const { return (bits_ & ~o.bits_) == 0; }
  bool intersects(FeatureSubset o) const { return (bits_ & o.bits_) != 0; }

  /// Members in ascending index order.
  std::vector<int> members() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(count()));
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  friend bool operator==(FeatureSubset a, FeatureSubset b) { return a.bits_ == b.bits_; }
  friend bool operator!=(FeatureSubset a, FeatureSubset b) { return a.bits_ != b.bits_; }

  /// Lexicographic order on the ascending member sequence; used to keep
  /// serialized explanation lists byte-stable.
  friend bool operator<(FeatureSubset a, FeatureSubset b) {
    std::uint64_t x = a.bits_, y = b.bits_;
    while (x != 0 && y != 0) {
      int i = std::countr_zero(x), j = std::countr_zero(y);
      if (i != j) return i < j;
      x &= x - 1;
      y &= y - 1;
    }
    return x == 0 && y != 0;
  }

 private:
  static void check_index(int i) {
    if (i < 0 || i >= 63) throw ValidationError("feature index out of supported range");
  }
  std::uint64_t bits_ = 0;
};

}  // namespace axp

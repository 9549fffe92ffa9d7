#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "axp/errors.hpp"

namespace axp {

/// A discrete feature value: an integer or a symbol.
struct Value {
  enum class Kind { Int, Sym };
  Kind kind = Kind::Int;
  std::int64_t num = 0;
  std::string sym;

  static Value integer(std::int64_t v) { return Value{Kind::Int, v, {}}; }
  static Value symbol(std::string s) { return Value{Kind::Sym, 0, std::move(s)}; }

  bool is_int() const { return kind == Kind::Int; }
  std::string str() const { return is_int() ? std::to_string(num) : sym; }

  friend bool operator==(const Value& a, const Value& b) {
    return a.kind == b.kind && a.num == b.num && a.sym == b.sym;
  }
};

/// A named feature with a finite domain of distinct values. A domain is
/// "ordered" (and thus usable with <, <=, >, >=) when every value is an
/// integer and the declared list is strictly increasing.
struct FeatureDef {
  std::string name;
  std::vector<Value> domain;

  int cardinality() const { return static_cast<int>(domain.size()); }

  bool ordered() const {
    for (std::size_t i = 0; i < domain.size(); ++i) {
      if (!domain[i].is_int()) return false;
      if (i > 0 && domain[i - 1].num >= domain[i].num) return false;
    }
    return !domain.empty();
  }

  std::optional<int> rank_of(const Value& v) const {
    for (std::size_t i = 0; i < domain.size(); ++i)
      if (domain[i] == v) return static_cast<int>(i);
    return std::nullopt;
  }
};

/// An ordered list of features; a feature's index is its position here.
class FeatureSpace {
 public:
  explicit FeatureSpace(std::vector<FeatureDef> features);

  int size() const { return static_cast<int>(features_.size()); }
  const FeatureDef& feature(int i) const;
  const std::vector<FeatureDef>& features() const { return features_; }
  std::optional<int> index_of(const std::string& name) const;

 private:
  std::vector<FeatureDef> features_;
};

/// A full assignment, one value per feature in space order.
struct Instance {
  std::vector<Value> values;
};

/// Per-feature domain positions of an instance's values. Throws a
/// ValidationError naming the offending feature on any mismatch.
std::vector<int> ranks_of(const FeatureSpace& space, const Instance& x);

/// Inverse of ranks_of.
Instance instance_from_ranks(const FeatureSpace& space, const std::vector<int>& ranks);

}  // namespace axp

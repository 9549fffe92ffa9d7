#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "axp/domain.hpp"
#include "axp/subset.hpp"

namespace axp {

enum class CmpOp { Eq, Neq, Lt, Le, Gt, Ge, In };

std::string op_name(CmpOp op);
std::optional<CmpOp> op_from_name(const std::string& name);

/// A single literal over one feature, e.g. Age > 20 or Purpose in {Car, Edu}.
/// Ordered comparators are only meaningful on features with ordered domains
/// and compare numerically, so Age > 20 with domain {18, 22, 30} matches
/// {22, 30} even though 20 itself is not a domain value.
struct Condition {
  int feature = 0;
  CmpOp op = CmpOp::Eq;
  std::vector<Value> operands;  // one value for Eq..Ge, a value set for In

  static Condition eq(int f, Value v) { return {f, CmpOp::Eq, {std::move(v)}}; }
  static Condition neq(int f, Value v) { return {f, CmpOp::Neq, {std::move(v)}}; }
  static Condition lt(int f, std::int64_t v) { return {f, CmpOp::Lt, {Value::integer(v)}}; }
  static Condition le(int f, std::int64_t v) { return {f, CmpOp::Le, {Value::integer(v)}}; }
  static Condition gt(int f, std::int64_t v) { return {f, CmpOp::Gt, {Value::integer(v)}}; }
  static Condition ge(int f, std::int64_t v) { return {f, CmpOp::Ge, {Value::integer(v)}}; }
  static Condition in_set(int f, std::vector<Value> vs) { return {f, CmpOp::In, std::move(vs)}; }
};

struct Rule {
  std::vector<Condition> conjuncts;
};

/// Pure disjunction of conjunctive rules: outputs 1 iff some rule fires.
struct RuleSetModel {
  std::vector<Rule> rules;
};

/// Either an internal node (condition + both children) or a leaf (class).
struct TreeNode {
  std::optional<Condition> condition;
  int on_true = -1;
  int on_false = -1;
  int leaf_class = -1;

  bool is_leaf() const { return !condition.has_value(); }
  static TreeNode leaf(int cls) { return TreeNode{std::nullopt, -1, -1, cls}; }
  static TreeNode internal(Condition c, int t, int f) { return TreeNode{std::move(c), t, f, -1}; }
};

struct DecisionTreeModel {
  std::vector<TreeNode> nodes;
  int root = 0;
};

struct Model;

/// Two-level dispatch: evaluate gate, then on_true or on_false.
struct GatedModel {
  std::shared_ptr<const Model> gate;
  std::shared_ptr<const Model> on_true;
  std::shared_ptr<const Model> on_false;
};

struct Model {
  std::variant<RuleSetModel, DecisionTreeModel, GatedModel> repr;

  static Model rules(std::vector<Rule> rs) { return Model{RuleSetModel{std::move(rs)}}; }
  static Model tree(std::vector<TreeNode> nodes, int root = 0) {
    return Model{DecisionTreeModel{std::move(nodes), root}};
  }
  static Model gated(Model gate, Model on_true, Model on_false) {
    return Model{GatedModel{std::make_shared<Model>(std::move(gate)),
                            std::make_shared<Model>(std::move(on_true)),
                            std::make_shared<Model>(std::move(on_false))}};
  }
};

/// Does `v` satisfy the condition? Ordered comparators on non-integer
/// values raise a ValidationError; validate() reports them beforehand.
bool condition_holds(const FeatureSpace& space, const Condition& c, const Value& v);

/// Bitmask over the feature's domain ranks of the values satisfying c.
std::uint64_t condition_mask(const FeatureSpace& space, const Condition& c);

int predict(const FeatureSpace& space, const Model& model, const Instance& x);

/// A validation finding. Fatal ones make evaluation undefined (bad indices,
/// malformed trees, comparators the domain cannot answer); the rest flag
/// suspicious but well-defined structure (constant conditions, dead paths).
struct Diagnostic {
  bool fatal = false;
  std::string message;
};

std::vector<Diagnostic> validate_diagnostics(const FeatureSpace& space, const Model& model);

/// Structural diagnostics: out-of-range feature indices, comparator/domain
/// mismatches, operands outside the domain, malformed or dead tree paths.
/// Empty result means every invariant holds.
std::vector<std::string> validate(const FeatureSpace& space, const Model& model);

/// A bijection on feature indices, i -> map[i].
struct Permutation {
  std::vector<int> map;

  explicit Permutation(std::vector<int> m);
  static Permutation identity(int n);
  static Permutation transposition(int n, int a, int b);
  int size() const { return static_cast<int>(map.size()); }
  Permutation inverse() const;
};

struct PermutedProblem {
  FeatureSpace space;
  Model model;
  Instance instance;
};

/// Relabels feature i as pi(i) throughout: space order, condition indices and
/// instance slots all move together, so predictions are preserved.
PermutedProblem permute(const FeatureSpace& space, const Model& model, const Instance& x,
                        const Permutation& pi);

struct ContractedProblem {
  FeatureSpace space;
  Model model;
  Instance instance;
  int merged_index;                 // position of the merged feature
  std::vector<int> index_map;       // old feature index -> new index (merged members map to merged_index)
};

/// Replaces the features in T (|T| >= 2) by one feature whose domain is the
/// Cartesian product of the members' domains (composite symbols, mixed-radix
/// order). Conditions on members become In-sets over the product values; the
/// merged feature sits at min(T)'s position. Predictions are preserved under
/// the induced bijection on instances.
ContractedProblem contract(const FeatureSpace& space, const Model& model, const Instance& x,
                           FeatureSubset t);

/// Maps any instance of the original space onto the contracted space.
Instance contract_instance(const FeatureSpace& space, const ContractedProblem& cp,
                           FeatureSubset t, const Instance& x);

}  // namespace axp

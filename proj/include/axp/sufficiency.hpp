#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "axp/model.hpp"
#include "axp/subset.hpp"

namespace axp {

/// Size cap for exhaustive enumeration, overridable via AXP_ORACLE_CAP.
std::uint64_t oracle_cap();

/// Model lowered to domain-rank masks for fast evaluation and region search.
struct CompiledRule {
  // one entry per distinct feature, masks of same-feature conjuncts merged
  std::vector<std::pair<int, std::uint64_t>> conjuncts;
};
struct CompiledRuleSet {
  std::vector<CompiledRule> rules;
};
struct CompiledTreeNode {
  int feature = -1;
  std::uint64_t mask = 0;
  int on_true = -1;
  int on_false = -1;
  int leaf_class = -1;
  bool is_leaf() const { return feature < 0; }
};
struct CompiledTree {
  std::vector<CompiledTreeNode> nodes;
  int root = 0;
};
struct CompiledModel;
struct CompiledGate {
  std::shared_ptr<const CompiledModel> gate, on_true, on_false;
};
struct CompiledModel {
  std::variant<CompiledRuleSet, CompiledTree, CompiledGate> repr;
};

CompiledModel compile(const FeatureSpace& space, const Model& model);
int predict_ranks(const CompiledModel& m, const std::vector<int>& ranks);

/// Per-feature sets of still-allowed domain ranks. Every instance drawn from
/// a box agrees with the base point on the fixed features.
struct Box {
  std::vector<std::uint64_t> allowed;
};

/// Depth-first search over maximal constant-output regions of the model
/// within `box`: visits sub-boxes on which the output is `target` everywhere.
/// Rule sets branch DPLL-style (choose a conjunct to falsify per rule, with
/// unit propagation); trees walk consistent paths; gated models join gate
/// regions with branch regions. The visitor returns true to stop the search.
bool visit_target_boxes(const CompiledModel& m, Box& box, int target,
                        const std::function<bool(const Box&)>& visit);

/// Immutable bundle of space + model + point with precomputed artifacts.
/// All downstream operations (sufficiency, enumeration, scoring) take one.
struct Problem {
  FeatureSpace space;
  Model model;
  Instance instance;
  CompiledModel compiled;
  std::vector<int> ranks;
  int prediction;

  static Problem make(FeatureSpace space, Model model, Instance instance);
  int n() const { return space.size(); }
  std::uint64_t full_mask(int feature) const {
    return (std::uint64_t{1} << space.feature(feature).cardinality()) - 1;
  }
  Box fixed_box(FeatureSubset s) const;
};

struct FlipWitness {
  Instance instance;
  FeatureSubset agrees_on;
};

/// Decides Eq-style sufficiency: does every completion that agrees with the
/// point on S keep the prediction? Structural (no completion enumeration).
bool is_sufficient(const Problem& p, FeatureSubset s);

/// A completion that agrees on S yet flips the prediction, if one exists.
std::optional<FlipWitness> find_flip_witness(const Problem& p, FeatureSubset s);

/// Literal quantifier over all completions of the free features. Exact;
/// refuses (OracleCapError) when the completion count exceeds the cap.
bool is_sufficient_bruteforce(const Problem& p, FeatureSubset s,
                              std::uint64_t cap = oracle_cap());

}  // namespace axp

#include "axp/random_models.hpp"

namespace axp {

namespace {

// Conditions lean toward holding at the reference point about half the time,
// so a random rule is often one or two flips away from firing there. Without
// that bias almost every random model is constant near the point and the
// explanation families degenerate to singletons.
Condition random_condition(SplitMix64& rng, const FeatureSpace& space,
                           const std::vector<int>& xranks) {
  int f = static_cast<int>(rng.below(static_cast<std::uint64_t>(space.size())));
  int d = space.feature(f).cardinality();
  int xr = xranks[static_cast<std::size_t>(f)];
  std::int64_t xv = space.feature(f).domain[static_cast<std::size_t>(xr)].num;
  bool anchor = rng.below(3) != 0;

  if (anchor) {
    // satisfied at the point but never a tautology
    switch (rng.below(4)) {
      case 0:
        return Condition::eq(f, Value::integer(xv));
      case 1: {
        int other = (xr + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(d - 1)))) % d;
        return Condition::neq(f, space.feature(f).domain[static_cast<std::size_t>(other)]);
      }
      default: {
        bool upper = rng.below(2) == 0;
        if (xr == 0) upper = true;
        if (xr == d - 1) upper = false;
        return upper ? Condition::le(f, xv) : Condition::ge(f, xv);
      }
    }
  }

  switch (rng.below(7)) {
    case 0:
      return Condition::eq(f, space.feature(f).domain[rng.below(static_cast<std::uint64_t>(d))]);
    case 1:
      return Condition::neq(f, space.feature(f).domain[rng.below(static_cast<std::uint64_t>(d))]);
    case 2:
      return Condition::lt(f, static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(d + 1))));
    case 3:
      return Condition::le(f, static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(d + 1))));
    case 4:
      return Condition::gt(f, static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(d + 1))) - 1);
    case 5:
      return Condition::ge(f, static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(d + 1))));
    default: {
      std::vector<Value> vs;
      for (const auto& v : space.feature(f).domain)
        if (rng.below(2)) vs.push_back(v);
      return Condition::in_set(f, std::move(vs));
    }
  }
}

Model random_rule_set(SplitMix64& rng, const FeatureSpace& space, const std::vector<int>& xranks) {
  std::vector<Rule> rules;
  int nrules = 2 + static_cast<int>(rng.below(5));
  for (int r = 0; r < nrules; ++r) {
    Rule rule;
    int nconj = 1 + static_cast<int>(rng.below(3));
    for (int c = 0; c < nconj; ++c) rule.conjuncts.push_back(random_condition(rng, space, xranks));
    rules.push_back(std::move(rule));
  }
  return Model::rules(std::move(rules));
}

int random_tree_nodes(SplitMix64& rng, const FeatureSpace& space, const std::vector<int>& xranks,
                      std::vector<TreeNode>& nodes, int depth) {
  if (depth == 0 || rng.below(4) == 0) {
    nodes.push_back(TreeNode::leaf(static_cast<int>(rng.below(2))));
    return static_cast<int>(nodes.size()) - 1;
  }
  Condition c = random_condition(rng, space, xranks);
  int self = static_cast<int>(nodes.size());
  nodes.push_back(TreeNode::leaf(0));  // placeholder
  int t = random_tree_nodes(rng, space, xranks, nodes, depth - 1);
  int f = random_tree_nodes(rng, space, xranks, nodes, depth - 1);
  nodes[static_cast<std::size_t>(self)] = TreeNode::internal(std::move(c), t, f);
  return self;
}

Model random_tree(SplitMix64& rng, const FeatureSpace& space, const std::vector<int>& xranks) {
  std::vector<TreeNode> nodes;
  int root = random_tree_nodes(rng, space, xranks, nodes, 4);
  return Model::tree(std::move(nodes), root);
}

Model random_flat_model(SplitMix64& rng, const FeatureSpace& space, const std::vector<int>& xranks,
                        const RandomModelOptions& opt) {
  if (opt.allow_trees && rng.below(3) == 0) return random_tree(rng, space, xranks);
  return random_rule_set(rng, space, xranks);
}

}  // namespace

Problem random_problem(SplitMix64& rng, const RandomModelOptions& opt) {
  int n = opt.min_features +
          static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_features - opt.min_features + 1)));
  std::vector<FeatureDef> feats;
  feats.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int d = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_domain - 1)));
    std::vector<Value> domain;
    for (int v = 0; v < d; ++v) domain.push_back(Value::integer(v));
    feats.push_back(FeatureDef{"f" + std::to_string(i), std::move(domain)});
  }
  FeatureSpace space(std::move(feats));

  std::vector<int> ranks(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    ranks[static_cast<std::size_t>(i)] =
        static_cast<int>(rng.below(static_cast<std::uint64_t>(space.feature(i).cardinality())));

  Model model = [&] {
    if (opt.allow_gated && rng.below(4) == 0)
      return Model::gated(random_flat_model(rng, space, ranks, opt),
                          random_flat_model(rng, space, ranks, opt),
                          random_flat_model(rng, space, ranks, opt));
    return random_flat_model(rng, space, ranks, opt);
  }();

  Instance x = instance_from_ranks(space, ranks);
  return Problem::make(std::move(space), std::move(model), std::move(x));
}

FeatureSubset random_subset(SplitMix64& rng, int n) {
  FeatureSubset s;
  for (int i = 0; i < n; ++i)
    if (rng.below(2)) s = s.with(i);
  return s;
}

}  // namespace axp

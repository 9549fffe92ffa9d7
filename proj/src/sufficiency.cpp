#include "axp/sufficiency.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <utility>

namespace axp {

std::uint64_t oracle_cap() {
  static const std::uint64_t cap = [] {
    if (const char* env = std::getenv("AXP_ORACLE_CAP")) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 10);
      if (end && *end == '\0' && v > 0) return static_cast<std::uint64_t>(v);
    }
    return std::uint64_t{1} << 22;
  }();
  return cap;
}

CompiledModel compile(const FeatureSpace& space, const Model& model) {
  for (const auto& d : validate_diagnostics(space, model))
    if (d.fatal) throw ValidationError("invalid model: " + d.message);

  struct Visitor {
    const FeatureSpace& space;

    CompiledModel operator()(const RuleSetModel& rs) const {
      CompiledRuleSet out;
      out.rules.reserve(rs.rules.size());
      for (const auto& rule : rs.rules) {
        std::map<int, std::uint64_t> merged;
        for (const auto& c : rule.conjuncts) {
          std::uint64_t m = condition_mask(space, c);
          auto [it, fresh] = merged.emplace(c.feature, m);
          if (!fresh) it->second &= m;
        }
        CompiledRule cr;
        cr.conjuncts.assign(merged.begin(), merged.end());
        out.rules.push_back(std::move(cr));
      }
      return CompiledModel{std::move(out)};
    }

    CompiledModel operator()(const DecisionTreeModel& dt) const {
      CompiledTree out;
      out.root = dt.root;
      out.nodes.reserve(dt.nodes.size());
      for (const auto& n : dt.nodes) {
        CompiledTreeNode cn;
        if (n.is_leaf()) {
          cn.leaf_class = n.leaf_class;
        } else {
          cn.feature = n.condition->feature;
          cn.mask = condition_mask(space, *n.condition);
          cn.on_true = n.on_true;
          cn.on_false = n.on_false;
        }
        out.nodes.push_back(cn);
      }
      return CompiledModel{std::move(out)};
    }

    CompiledModel operator()(const GatedModel& g) const {
      CompiledGate out;
      out.gate = std::make_shared<CompiledModel>(compile(space, *g.gate));
      out.on_true = std::make_shared<CompiledModel>(compile(space, *g.on_true));
      out.on_false = std::make_shared<CompiledModel>(compile(space, *g.on_false));
      return CompiledModel{std::move(out)};
    }
  };
  return std::visit(Visitor{space}, model.repr);
}

int predict_ranks(const CompiledModel& m, const std::vector<int>& ranks) {
  struct Visitor {
    const std::vector<int>& ranks;

    int operator()(const CompiledRuleSet& rs) const {
      for (const auto& rule : rs.rules) {
        bool fires = true;
        for (const auto& [f, mask] : rule.conjuncts) {
          if (((mask >> ranks[static_cast<std::size_t>(f)]) & 1u) == 0) {
            fires = false;
            break;
          }
        }
        if (fires) return 1;
      }
      return 0;
    }
    int operator()(const CompiledTree& dt) const {
      int node = dt.root;
      for (;;) {
        const auto& n = dt.nodes[static_cast<std::size_t>(node)];
        if (n.is_leaf()) return n.leaf_class;
        bool t = (n.mask >> ranks[static_cast<std::size_t>(n.feature)]) & 1u;
        node = t ? n.on_true : n.on_false;
      }
    }
    int operator()(const CompiledGate& g) const {
      return predict_ranks(predict_ranks(*g.gate, ranks) == 1 ? *g.on_true : *g.on_false, ranks);
    }
  };
  return std::visit(Visitor{ranks}, m.repr);
}

namespace {

using BoxVisitor = std::function<bool(const Box&)>;

struct MaskUndo {
  Box& box;
  std::vector<std::pair<int, std::uint64_t>> saved;
  explicit MaskUndo(Box& b) : box(b) {}
  void restrict_to(int f, std::uint64_t mask) {
    saved.emplace_back(f, box.allowed[static_cast<std::size_t>(f)]);
    box.allowed[static_cast<std::size_t>(f)] &= mask;
  }
  ~MaskUndo() {
    for (auto it = saved.rbegin(); it != saved.rend(); ++it)
      box.allowed[static_cast<std::size_t>(it->first)] = it->second;
  }
};

// Searches for a sub-box on which *no* rule fires. Per rule, some conjunct
// must be false on the whole sub-box; rules whose conjuncts cannot all hold
// within the current box are already dead. Unit propagation applies forced
// restrictions before branching.
bool avoid_all_rules(const CompiledRuleSet& rs, Box& box, const BoxVisitor& visit,
                     std::vector<bool>& neutral) {
  MaskUndo undo(box);

  // propagate until fixpoint
  for (;;) {
    bool changed = false;
    for (std::size_t r = 0; r < rs.rules.size(); ++r) {
      if (neutral[r]) continue;
      bool dead = false;
      int options = 0;
      const std::pair<int, std::uint64_t>* only = nullptr;
      for (const auto& cj : rs.rules[r].conjuncts) {
        std::uint64_t cur = box.allowed[static_cast<std::size_t>(cj.first)];
        if ((cur & cj.second) == 0) { dead = true; break; }
        if ((cur & ~cj.second) != 0) { ++options; only = &cj; }
      }
      if (dead) { neutral[r] = true; changed = true; continue; }
      if (options == 0) return false;  // rule fires everywhere in the box
      if (options == 1) {
        undo.restrict_to(only->first, ~only->second);
        neutral[r] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }

  // find a rule to branch on
  std::size_t pick = rs.rules.size();
  for (std::size_t r = 0; r < rs.rules.size(); ++r)
    if (!neutral[r]) { pick = r; break; }
  if (pick == rs.rules.size()) return visit(box);

  std::vector<bool> saved_neutral = neutral;
  for (const auto& cj : rs.rules[pick].conjuncts) {
    std::uint64_t cur = box.allowed[static_cast<std::size_t>(cj.first)];
    if ((cur & ~cj.second) == 0) continue;
    MaskUndo branch(box);
    branch.restrict_to(cj.first, ~cj.second);
    neutral[pick] = true;
    if (avoid_all_rules(rs, box, visit, neutral)) return true;
    neutral = saved_neutral;
  }
  return false;
}

bool visit_tree_boxes(const CompiledTree& dt, int node, Box& box, int target,
                      const BoxVisitor& visit) {
  const auto& n = dt.nodes[static_cast<std::size_t>(node)];
  if (n.is_leaf()) return n.leaf_class == target ? visit(box) : false;
  for (int branch = 1; branch >= 0; --branch) {
    std::uint64_t cur = box.allowed[static_cast<std::size_t>(n.feature)];
    std::uint64_t next = branch ? (cur & n.mask) : (cur & ~n.mask);
    if (next == 0) continue;
    MaskUndo undo(box);
    undo.restrict_to(n.feature, next);
    if (visit_tree_boxes(dt, branch ? n.on_true : n.on_false, box, target, visit)) return true;
  }
  return false;
}

}  // namespace

bool visit_target_boxes(const CompiledModel& m, Box& box, int target, const BoxVisitor& visit) {
  struct Visitor {
    Box& box;
    int target;
    const BoxVisitor& visit;

    bool operator()(const CompiledRuleSet& rs) const {
      if (target == 1) {
        for (const auto& rule : rs.rules) {
          MaskUndo undo(box);
          bool feasible = true;
          for (const auto& [f, mask] : rule.conjuncts) {
            undo.restrict_to(f, mask);
            if (box.allowed[static_cast<std::size_t>(f)] == 0) { feasible = false; break; }
          }
          if (feasible && visit(box)) return true;
        }
        return false;
      }
      std::vector<bool> neutral(rs.rules.size(), false);
      return avoid_all_rules(rs, box, visit, neutral);
    }

    bool operator()(const CompiledTree& dt) const {
      return visit_tree_boxes(dt, dt.root, box, target, visit);
    }

    bool operator()(const CompiledGate& g) const {
      for (int b = 1; b >= 0; --b) {
        const CompiledModel& branch = b ? *g.on_true : *g.on_false;
        auto through = [&](const Box&) { return visit_target_boxes(branch, box, target, visit); };
        if (visit_target_boxes(*g.gate, box, b, through)) return true;
      }
      return false;
    }
  };
  return std::visit(Visitor{box, target, visit}, m.repr);
}

Problem Problem::make(FeatureSpace space, Model model, Instance instance) {
  CompiledModel compiled = compile(space, model);
  std::vector<int> ranks = ranks_of(space, instance);
  int prediction = predict_ranks(compiled, ranks);
  return Problem{std::move(space), std::move(model), std::move(instance), std::move(compiled),
                 std::move(ranks), prediction};
}

Box Problem::fixed_box(FeatureSubset s) const {
  Box box;
  box.allowed.reserve(static_cast<std::size_t>(n()));
  for (int i = 0; i < n(); ++i) {
    if (s.contains(i))
      box.allowed.push_back(std::uint64_t{1} << ranks[static_cast<std::size_t>(i)]);
    else
      box.allowed.push_back(full_mask(i));
  }
  return box;
}

bool is_sufficient(const Problem& p, FeatureSubset s) {
  if (!s.subset_of(FeatureSubset::full(p.n())))
    throw ValidationError("feature subset out of range");
  Box box = p.fixed_box(s);
  return !visit_target_boxes(p.compiled, box, 1 - p.prediction,
                             [](const Box&) { return true; });
}

std::optional<FlipWitness> find_flip_witness(const Problem& p, FeatureSubset s) {
  if (!s.subset_of(FeatureSubset::full(p.n())))
    throw ValidationError("feature subset out of range");
  Box box = p.fixed_box(s);
  std::optional<FlipWitness> found;
  visit_target_boxes(p.compiled, box, 1 - p.prediction, [&](const Box& b) {
    std::vector<int> ranks(static_cast<std::size_t>(p.n()));
    for (int i = 0; i < p.n(); ++i) {
      std::uint64_t allowed = b.allowed[static_cast<std::size_t>(i)];
      int base = p.ranks[static_cast<std::size_t>(i)];
      // keep the point's own value wherever the region admits it
      ranks[static_cast<std::size_t>(i)] =
          ((allowed >> base) & 1u) ? base : std::countr_zero(allowed);
    }
    found = FlipWitness{instance_from_ranks(p.space, ranks), s};
    return true;
  });
  return found;
}

bool is_sufficient_bruteforce(const Problem& p, FeatureSubset s, std::uint64_t cap) {
  if (!s.subset_of(FeatureSubset::full(p.n())))
    throw ValidationError("feature subset out of range");
  std::vector<int> free_feats;
  std::uint64_t completions = 1;
  for (int i = 0; i < p.n(); ++i) {
    if (s.contains(i)) continue;
    free_feats.push_back(i);
    std::uint64_t card = static_cast<std::uint64_t>(p.space.feature(i).cardinality());
    if (completions > cap / card)
      throw OracleCapError("sufficiency oracle too large: completion count exceeds cap " +
                           std::to_string(cap));
    completions *= card;
  }

  std::vector<int> ranks = p.ranks;
  for (int f : free_feats) ranks[static_cast<std::size_t>(f)] = 0;
  for (;;) {
    if (predict_ranks(p.compiled, ranks) != p.prediction) return false;
    std::size_t k = 0;
    for (; k < free_feats.size(); ++k) {
      int f = free_feats[k];
      if (++ranks[static_cast<std::size_t>(f)] < p.space.feature(f).cardinality()) break;
      ranks[static_cast<std::size_t>(f)] = 0;
    }
    if (k == free_feats.size()) break;
  }
  return true;
}

}  // namespace axp

#include "axp/model.hpp"

#include <algorithm>
#include <unordered_map>

namespace axp {

std::string op_name(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "eq";
    case CmpOp::Neq: return "neq";
    case CmpOp::Lt: return "lt";
    case CmpOp::Le: return "le";
    case CmpOp::Gt: return "gt";
    case CmpOp::Ge: return "ge";
    case CmpOp::In: return "in";
  }
  return "?";
}

std::optional<CmpOp> op_from_name(const std::string& name) {
  if (name == "eq") return CmpOp::Eq;
  if (name == "neq") return CmpOp::Neq;
  if (name == "lt") return CmpOp::Lt;
  if (name == "le") return CmpOp::Le;
  if (name == "gt") return CmpOp::Gt;
  if (name == "ge") return CmpOp::Ge;
  if (name == "in") return CmpOp::In;
  return std::nullopt;
}

bool condition_holds(const FeatureSpace& space, const Condition& c, const Value& v) {
  const auto& feat = space.feature(c.feature);
  switch (c.op) {
    case CmpOp::Eq:
    case CmpOp::Neq: {
      if (c.operands.size() != 1) throw ValidationError("eq/neq condition needs exactly one operand");
      bool eq = (v == c.operands[0]);
      return c.op == CmpOp::Eq ? eq : !eq;
    }
    case CmpOp::Lt:
    case CmpOp::Le:
    case CmpOp::Gt:
    case CmpOp::Ge: {
      if (c.operands.size() != 1) throw ValidationError("ordered condition needs exactly one operand");
      if (!v.is_int() || !c.operands[0].is_int())
        throw ValidationError("ordered comparator on non-integer value for feature '" + feat.name + "'");
      std::int64_t a = v.num, b = c.operands[0].num;
      switch (c.op) {
        case CmpOp::Lt: return a < b;
        case CmpOp::Le: return a <= b;
        case CmpOp::Gt: return a > b;
        default: return a >= b;
      }
    }
    case CmpOp::In: {
      for (const auto& o : c.operands)
        if (v == o) return true;
      return false;
    }
  }
  return false;
}

namespace {

int predict_impl(const FeatureSpace& space, const Model& m, const Instance& x) {
  struct Visitor {
    const FeatureSpace& space;
    const Instance& x;

    int operator()(const RuleSetModel& rs) const {
      for (const auto& rule : rs.rules) {
        bool fires = true;
        for (const auto& c : rule.conjuncts) {
          if (!condition_holds(space, c, x.values[static_cast<std::size_t>(c.feature)])) {
            fires = false;
            break;
          }
        }
        if (fires) return 1;
      }
      return 0;
    }

    int operator()(const DecisionTreeModel& dt) const {
      int node = dt.root;
      for (std::size_t steps = 0; steps <= dt.nodes.size(); ++steps) {
        if (node < 0 || node >= static_cast<int>(dt.nodes.size()))
          throw ValidationError("decision tree child index out of range");
        const TreeNode& tn = dt.nodes[static_cast<std::size_t>(node)];
        if (tn.is_leaf()) {
          if (tn.leaf_class != 0 && tn.leaf_class != 1)
            throw ValidationError("decision tree leaf class must be 0 or 1");
          return tn.leaf_class;
        }
        bool t = condition_holds(space, *tn.condition, x.values[static_cast<std::size_t>(tn.condition->feature)]);
        node = t ? tn.on_true : tn.on_false;
      }
      throw ValidationError("decision tree walk did not terminate (cycle?)");
    }

    int operator()(const GatedModel& g) const {
      const Model& branch = predict_impl(space, *g.gate, x) == 1 ? *g.on_true : *g.on_false;
      return predict_impl(space, branch, x);
    }
  };
  return std::visit(Visitor{space, x}, m.repr);
}

}  // namespace

int predict(const FeatureSpace& space, const Model& model, const Instance& x) {
  ranks_of(space, x);  // rejects domain mismatches, naming the feature
  return predict_impl(space, model, x);
}

std::uint64_t condition_mask(const FeatureSpace& space, const Condition& c) {
  const auto& feat = space.feature(c.feature);
  std::uint64_t mask = 0;
  for (int r = 0; r < feat.cardinality(); ++r)
    if (condition_holds(space, c, feat.domain[static_cast<std::size_t>(r)]))
      mask |= std::uint64_t{1} << r;
  return mask;
}

namespace {

void validate_condition(const FeatureSpace& space, const Condition& c, const std::string& where,
                        std::vector<Diagnostic>& out) {
  if (c.feature < 0 || c.feature >= space.size()) {
    out.push_back({true, where + ": feature index " + std::to_string(c.feature) +
                             " out of range (n=" + std::to_string(space.size()) + ")"});
    return;
  }
  const auto& feat = space.feature(c.feature);
  switch (c.op) {
    case CmpOp::Eq:
    case CmpOp::Neq:
      if (c.operands.size() != 1) {
        out.push_back({true, where + ": eq/neq needs exactly one operand"});
      } else if (!feat.rank_of(c.operands[0])) {
        out.push_back({false, where + ": operand " + c.operands[0].str() +
                                  " is not in the domain of '" + feat.name +
                                  "' (condition is constant)"});
      }
      break;
    case CmpOp::Lt:
    case CmpOp::Le:
    case CmpOp::Gt:
    case CmpOp::Ge:
      if (c.operands.size() != 1) {
        out.push_back({true, where + ": ordered comparator needs exactly one operand"});
      } else if (!feat.ordered()) {
        out.push_back({true, where + ": ordered comparator on unordered feature '" + feat.name + "'"});
      } else if (!c.operands[0].is_int()) {
        out.push_back({true, where + ": ordered comparator needs an integer operand"});
      }
      break;
    case CmpOp::In:
      for (const auto& o : c.operands)
        if (!feat.rank_of(o))
          out.push_back({false, where + ": in-set operand " + o.str() +
                                    " is not in the domain of '" + feat.name + "'"});
      break;
  }
}

bool condition_is_evaluable(const FeatureSpace& space, const Condition& c) {
  std::vector<Diagnostic> probe;
  validate_condition(space, c, "", probe);
  for (const auto& d : probe)
    if (d.fatal) return false;
  return true;
}

void validate_tree_paths(const FeatureSpace& space, const DecisionTreeModel& dt, int node,
                         std::vector<std::uint64_t>& allowed, std::vector<int>& on_path,
                         const std::string& where, std::vector<Diagnostic>& out) {
  if (node < 0 || node >= static_cast<int>(dt.nodes.size())) {
    out.push_back({true, where + ": child index " + std::to_string(node) + " out of range"});
    return;
  }
  if (std::find(on_path.begin(), on_path.end(), node) != on_path.end()) {
    out.push_back({true, where + ": cycle through node " + std::to_string(node)});
    return;
  }
  const TreeNode& tn = dt.nodes[static_cast<std::size_t>(node)];
  if (tn.is_leaf()) {
    if (tn.leaf_class != 0 && tn.leaf_class != 1)
      out.push_back({true, where + ": node " + std::to_string(node) + " leaf class must be 0 or 1"});
    return;
  }
  validate_condition(space, *tn.condition, where + ": node " + std::to_string(node), out);
  if (!condition_is_evaluable(space, *tn.condition)) return;

  int f = tn.condition->feature;
  std::uint64_t mask = condition_mask(space, *tn.condition);
  std::uint64_t full = (std::uint64_t{1} << space.feature(f).cardinality()) - 1;
  on_path.push_back(node);
  for (int branch = 1; branch >= 0; --branch) {
    std::uint64_t next = allowed[static_cast<std::size_t>(f)] & (branch ? mask : (full & ~mask));
    int child = branch ? tn.on_true : tn.on_false;
    if (next == 0) {
      out.push_back({false, where + ": dead path at node " + std::to_string(node) + " (" +
                                (branch ? "true" : "false") + " branch unreachable on '" +
                                space.feature(f).name + "')"});
      continue;
    }
    std::uint64_t saved = allowed[static_cast<std::size_t>(f)];
    allowed[static_cast<std::size_t>(f)] = next;
    validate_tree_paths(space, dt, child, allowed, on_path, where, out);
    allowed[static_cast<std::size_t>(f)] = saved;
  }
  on_path.pop_back();
}

void validate_impl(const FeatureSpace& space, const Model& m, const std::string& where,
                   std::vector<Diagnostic>& out) {
  struct Visitor {
    const FeatureSpace& space;
    const std::string& where;
    std::vector<Diagnostic>& out;

    void operator()(const RuleSetModel& rs) const {
      for (std::size_t r = 0; r < rs.rules.size(); ++r)
        for (std::size_t k = 0; k < rs.rules[r].conjuncts.size(); ++k)
          validate_condition(space, rs.rules[r].conjuncts[k],
                             where + "rule " + std::to_string(r) + " conjunct " + std::to_string(k),
                             out);
    }

    void operator()(const DecisionTreeModel& dt) const {
      if (dt.nodes.empty()) {
        out.push_back({true, where + "tree: no nodes"});
        return;
      }
      if (dt.root < 0 || dt.root >= static_cast<int>(dt.nodes.size())) {
        out.push_back({true, where + "tree: root index out of range"});
        return;
      }
      std::vector<std::uint64_t> allowed;
      allowed.reserve(static_cast<std::size_t>(space.size()));
      for (int i = 0; i < space.size(); ++i)
        allowed.push_back((std::uint64_t{1} << space.feature(i).cardinality()) - 1);
      std::vector<int> on_path;
      validate_tree_paths(space, dt, dt.root, allowed, on_path, where + "tree", out);
    }

    void operator()(const GatedModel& g) const {
      validate_impl(space, *g.gate, where + "gate/", out);
      validate_impl(space, *g.on_true, where + "on_true/", out);
      validate_impl(space, *g.on_false, where + "on_false/", out);
    }
  };
  std::visit(Visitor{space, where, out}, m.repr);
}

}  // namespace

std::vector<Diagnostic> validate_diagnostics(const FeatureSpace& space, const Model& model) {
  std::vector<Diagnostic> out;
  validate_impl(space, model, "", out);
  return out;
}

std::vector<std::string> validate(const FeatureSpace& space, const Model& model) {
  std::vector<std::string> out;
  for (auto& d : validate_diagnostics(space, model)) out.push_back(std::move(d.message));
  return out;
}

Permutation::Permutation(std::vector<int> m) : map(std::move(m)) {
  std::vector<bool> seen(map.size(), false);
  for (int v : map) {
    if (v < 0 || v >= static_cast<int>(map.size()) || seen[static_cast<std::size_t>(v)])
      throw ValidationError("permutation is not a bijection");
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = i;
  return Permutation(std::move(m));
}

Permutation Permutation::transposition(int n, int a, int b) {
  auto p = identity(n);
  std::swap(p.map[static_cast<std::size_t>(a)], p.map[static_cast<std::size_t>(b)]);
  return p;
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(map.size());
  for (std::size_t i = 0; i < map.size(); ++i)
    inv[static_cast<std::size_t>(map[i])] = static_cast<int>(i);
  return Permutation(std::move(inv));
}

namespace {

Condition remap_condition(const Condition& c, const std::vector<int>& index_map) {
  Condition out = c;
  out.feature = index_map[static_cast<std::size_t>(c.feature)];
  return out;
}

Model remap_model(const Model& m, const std::vector<int>& index_map) {
  struct Visitor {
    const std::vector<int>& index_map;

    Model operator()(const RuleSetModel& rs) const {
      std::vector<Rule> rules;
      rules.reserve(rs.rules.size());
      for (const auto& r : rs.rules) {
        Rule nr;
        nr.conjuncts.reserve(r.conjuncts.size());
        for (const auto& c : r.conjuncts) nr.conjuncts.push_back(remap_condition(c, index_map));
        rules.push_back(std::move(nr));
      }
      return Model::rules(std::move(rules));
    }
    Model operator()(const DecisionTreeModel& dt) const {
      std::vector<TreeNode> nodes;
      nodes.reserve(dt.nodes.size());
      for (const auto& n : dt.nodes) {
        if (n.is_leaf()) {
          nodes.push_back(TreeNode::leaf(n.leaf_class));
        } else {
          nodes.push_back(TreeNode::internal(remap_condition(*n.condition, index_map), n.on_true, n.on_false));
        }
      }
      return Model::tree(std::move(nodes), dt.root);
    }
    Model operator()(const GatedModel& g) const {
      return Model::gated(remap_model(*g.gate, index_map), remap_model(*g.on_true, index_map),
                          remap_model(*g.on_false, index_map));
    }
  };
  return std::visit(Visitor{index_map}, m.repr);
}

}  // namespace

PermutedProblem permute(const FeatureSpace& space, const Model& model, const Instance& x,
                        const Permutation& pi) {
  if (pi.size() != space.size()) throw ValidationError("permutation size mismatch");
  std::vector<FeatureDef> feats(static_cast<std::size_t>(space.size()));
  std::vector<Value> values(static_cast<std::size_t>(space.size()));
  for (int i = 0; i < space.size(); ++i) {
    int j = pi.map[static_cast<std::size_t>(i)];
    feats[static_cast<std::size_t>(j)] = space.feature(i);
    values[static_cast<std::size_t>(j)] = x.values[static_cast<std::size_t>(i)];
  }
  return PermutedProblem{FeatureSpace(std::move(feats)), remap_model(model, pi.map),
                         Instance{std::move(values)}};
}

namespace {

// Composite domain values are the member value strings joined with '|',
// enumerated with the last member varying fastest.
std::vector<Value> product_domain(const FeatureSpace& space, const std::vector<int>& members) {
  std::vector<Value> out;
  std::vector<int> ranks(members.size(), 0);
  for (;;) {
    std::string sym;
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (k > 0) sym += "|";
      sym += space.feature(members[k]).domain[static_cast<std::size_t>(ranks[k])].str();
    }
    out.push_back(Value::symbol(sym));
    int k = static_cast<int>(members.size()) - 1;
    while (k >= 0) {
      if (++ranks[static_cast<std::size_t>(k)] < space.feature(members[static_cast<std::size_t>(k)]).cardinality()) break;
      ranks[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return out;
}

// Which component values of the merged feature satisfy a condition on member j?
Condition project_condition(const FeatureSpace& space, const Condition& c, const std::vector<int>& members,
                            int merged_index, const std::vector<Value>& merged_domain) {
  std::size_t pos = 0;
  while (members[pos] != c.feature) ++pos;
  std::vector<Value> sat;
  std::vector<int> ranks(members.size(), 0);
  for (const auto& composite : merged_domain) {
    if (condition_holds(space, c,
                        space.feature(members[pos]).domain[static_cast<std::size_t>(ranks[pos])]))
      sat.push_back(composite);
    int k = static_cast<int>(members.size()) - 1;
    while (k >= 0) {
      if (++ranks[static_cast<std::size_t>(k)] < space.feature(members[static_cast<std::size_t>(k)]).cardinality()) break;
      ranks[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return Condition::in_set(merged_index, std::move(sat));
}

Model contract_model(const FeatureSpace& space, const Model& m, const std::vector<int>& members,
                     const std::vector<int>& index_map, int merged_index,
                     const std::vector<Value>& merged_domain) {
  FeatureSubset t;
  for (int i : members) t = t.with(i);

  struct Visitor {
    const FeatureSpace& space;
    const std::vector<int>& members;
    const std::vector<int>& index_map;
    int merged_index;
    const std::vector<Value>& merged_domain;
    FeatureSubset t;

    Condition map_condition(const Condition& c) const {
      if (t.contains(c.feature))
        return project_condition(space, c, members, merged_index, merged_domain);
      return remap_condition(c, index_map);
    }

    Model operator()(const RuleSetModel& rs) const {
      std::vector<Rule> rules;
      rules.reserve(rs.rules.size());
      for (const auto& r : rs.rules) {
        Rule nr;
        for (const auto& c : r.conjuncts) nr.conjuncts.push_back(map_condition(c));
        rules.push_back(std::move(nr));
      }
      return Model::rules(std::move(rules));
    }
    Model operator()(const DecisionTreeModel& dt) const {
      std::vector<TreeNode> nodes;
      for (const auto& n : dt.nodes) {
        if (n.is_leaf()) nodes.push_back(TreeNode::leaf(n.leaf_class));
        else nodes.push_back(TreeNode::internal(map_condition(*n.condition), n.on_true, n.on_false));
      }
      return Model::tree(std::move(nodes), dt.root);
    }
    Model operator()(const GatedModel& g) const {
      return Model::gated(
          contract_model(space, *g.gate, members, index_map, merged_index, merged_domain),
          contract_model(space, *g.on_true, members, index_map, merged_index, merged_domain),
          contract_model(space, *g.on_false, members, index_map, merged_index, merged_domain));
    }
  };
  return std::visit(Visitor{space, members, index_map, merged_index, merged_domain, t}, m.repr);
}

}  // namespace

ContractedProblem contract(const FeatureSpace& space, const Model& model, const Instance& x,
                           FeatureSubset t) {
  if (t.count() < 2) throw ValidationError("contraction needs at least two features");
  auto members = t.members();
  if (members.back() >= space.size()) throw ValidationError("contraction set out of range");

  std::vector<int> index_map(static_cast<std::size_t>(space.size()), -1);
  std::vector<FeatureDef> feats;
  int merged_index = -1;
  std::string merged_name = "[";
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (k > 0) merged_name += "+";
    merged_name += space.feature(members[k]).name;
  }
  merged_name += "]";
  auto merged_domain = product_domain(space, members);

  for (int i = 0; i < space.size(); ++i) {
    if (i == members.front()) {
      merged_index = static_cast<int>(feats.size());
      feats.push_back(FeatureDef{merged_name, merged_domain});
      index_map[static_cast<std::size_t>(i)] = merged_index;
    } else if (t.contains(i)) {
      // filled after merged_index is known
    } else {
      index_map[static_cast<std::size_t>(i)] = static_cast<int>(feats.size());
      feats.push_back(space.feature(i));
    }
  }
  for (int i : members) index_map[static_cast<std::size_t>(i)] = merged_index;

  ContractedProblem cp{FeatureSpace(std::move(feats)),
                       contract_model(space, model, members, index_map, merged_index, merged_domain),
                       Instance{}, merged_index, index_map};
  cp.instance = contract_instance(space, cp, t, x);
  return cp;
}

Instance contract_instance(const FeatureSpace& space, const ContractedProblem& cp,
                           FeatureSubset t, const Instance& x) {
  ranks_of(space, x);
  auto members = t.members();
  std::string sym;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (k > 0) sym += "|";
    sym += x.values[static_cast<std::size_t>(members[k])].str();
  }
  Instance out;
  out.values.resize(static_cast<std::size_t>(cp.space.size()));
  out.values[static_cast<std::size_t>(cp.merged_index)] = Value::symbol(sym);
  for (int i = 0; i < space.size(); ++i) {
    if (t.contains(i)) continue;
    out.values[static_cast<std::size_t>(cp.index_map[static_cast<std::size_t>(i)])] =
        x.values[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace axp

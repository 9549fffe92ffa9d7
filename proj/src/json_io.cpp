#include "axp/json_io.hpp"

#include <algorithm>
#include <fstream>

namespace axp {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where, std::string("missing field '") + key + "'");
  return j.at(key);
}

int need_int(const Json& j, const char* key, const std::string& where) {
  const Json& v = need(j, key, where);
  if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  return v.get<int>();
}

}  // namespace

Json value_to_json(const Value& v) {
  if (v.is_int()) return Json(v.num);
  return Json(v.sym);
}

Value value_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Value::integer(j.get<std::int64_t>());
  if (j.is_string()) return Value::symbol(j.get<std::string>());
  fail(where, "domain values must be integers or strings");
}

Json space_to_json(const FeatureSpace& space) {
  Json features = Json::array();
  for (const auto& f : space.features()) {
    Json domain = Json::array();
    for (const auto& v : f.domain) domain.push_back(value_to_json(v));
    features.push_back(Json{{"domain", domain}, {"name", f.name}});
  }
  return features;
}

FeatureSpace space_from_json(const Json& j) {
  if (!j.is_array()) fail("features", "expected an array");
  std::vector<FeatureDef> defs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "features[" + std::to_string(i) + "]";
    const Json& fj = j.at(i);
    const Json& name = need(fj, "name", where);
    if (!name.is_string()) fail(where + ".name", "expected a string");
    const Json& dom = need(fj, "domain", where);
    if (!dom.is_array()) fail(where + ".domain", "expected an array");
    FeatureDef def;
    def.name = name.get<std::string>();
    for (std::size_t k = 0; k < dom.size(); ++k)
      def.domain.push_back(value_from_json(dom.at(k), where + ".domain[" + std::to_string(k) + "]"));
    defs.push_back(std::move(def));
  }
  return FeatureSpace(std::move(defs));
}

namespace {

Json condition_to_json(const Condition& c) {
  Json j{{"feature", c.feature}, {"op", op_name(c.op)}};
  if (c.op == CmpOp::In) {
    Json vals = Json::array();
    for (const auto& v : c.operands) vals.push_back(value_to_json(v));
    j["values"] = vals;
  } else {
    j["value"] = value_to_json(c.operands.at(0));
  }
  return j;
}

Condition condition_from_json(const Json& j, const std::string& where) {
  Condition c;
  c.feature = need_int(j, "feature", where);
  const Json& opj = need(j, "op", where);
  if (!opj.is_string()) fail(where + ".op", "expected a string");
  auto op = op_from_name(opj.get<std::string>());
  if (!op) fail(where + ".op", "unknown operator '" + opj.get<std::string>() + "'");
  c.op = *op;
  if (c.op == CmpOp::In) {
    const Json& vals = need(j, "values", where);
    if (!vals.is_array()) fail(where + ".values", "expected an array");
    for (std::size_t k = 0; k < vals.size(); ++k)
      c.operands.push_back(value_from_json(vals.at(k), where + ".values[" + std::to_string(k) + "]"));
  } else {
    c.operands.push_back(value_from_json(need(j, "value", where), where + ".value"));
  }
  return c;
}

}  // namespace

Json model_to_json(const Model& m) {
  struct Visitor {
    Json operator()(const RuleSetModel& rs) const {
      Json rules = Json::array();
      for (const auto& r : rs.rules) {
        Json conj = Json::array();
        for (const auto& c : r.conjuncts) conj.push_back(condition_to_json(c));
        rules.push_back(Json{{"conjuncts", conj}});
      }
      return Json{{"default_class", 0}, {"kind", "rule_set"}, {"rules", rules}};
    }
    Json operator()(const DecisionTreeModel& dt) const {
      Json nodes = Json::array();
      for (const auto& n : dt.nodes) {
        if (n.is_leaf())
          nodes.push_back(Json{{"class", n.leaf_class}});
        else
          nodes.push_back(Json{{"condition", condition_to_json(*n.condition)},
                               {"on_false", n.on_false},
                               {"on_true", n.on_true}});
      }
      return Json{{"kind", "decision_tree"}, {"nodes", nodes}, {"root", dt.root}};
    }
    Json operator()(const GatedModel& g) const {
      return Json{{"gate", model_to_json(*g.gate)},
                  {"kind", "gated"},
                  {"on_false", model_to_json(*g.on_false)},
                  {"on_true", model_to_json(*g.on_true)}};
    }
  };
  return std::visit(Visitor{}, m.repr);
}

Model model_from_json(const Json& j, const std::string& where) {
  const Json& kind = need(j, "kind", where);
  if (!kind.is_string()) fail(where + ".kind", "expected a string");
  std::string k = kind.get<std::string>();

  if (k == "rule_set") {
    if (j.contains("default_class") && (!j.at("default_class").is_number_integer() ||
                                        j.at("default_class").get<int>() != 0))
      fail(where + ".default_class", "rule sets always default to class 0");
    const Json& rules = need(j, "rules", where);
    if (!rules.is_array()) fail(where + ".rules", "expected an array");
    std::vector<Rule> out;
    for (std::size_t r = 0; r < rules.size(); ++r) {
      const std::string rwhere = where + ".rules[" + std::to_string(r) + "]";
      const Json& conj = need(rules.at(r), "conjuncts", rwhere);
      if (!conj.is_array()) fail(rwhere + ".conjuncts", "expected an array");
      Rule rule;
      for (std::size_t c = 0; c < conj.size(); ++c)
        rule.conjuncts.push_back(
            condition_from_json(conj.at(c), rwhere + ".conjuncts[" + std::to_string(c) + "]"));
      out.push_back(std::move(rule));
    }
    return Model::rules(std::move(out));
  }

  if (k == "decision_tree") {
    const Json& nodes = need(j, "nodes", where);
    if (!nodes.is_array()) fail(where + ".nodes", "expected an array");
    std::vector<TreeNode> out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const std::string nwhere = where + ".nodes[" + std::to_string(i) + "]";
      const Json& nj = nodes.at(i);
      if (nj.contains("class")) {
        out.push_back(TreeNode::leaf(need_int(nj, "class", nwhere)));
      } else {
        out.push_back(TreeNode::internal(
            condition_from_json(need(nj, "condition", nwhere), nwhere + ".condition"),
            need_int(nj, "on_true", nwhere), need_int(nj, "on_false", nwhere)));
      }
    }
    int root = j.contains("root") ? need_int(j, "root", where) : 0;
    return Model::tree(std::move(out), root);
  }

  if (k == "gated") {
    return Model::gated(model_from_json(need(j, "gate", where), where + ".gate"),
                        model_from_json(need(j, "on_true", where), where + ".on_true"),
                        model_from_json(need(j, "on_false", where), where + ".on_false"));
  }

  fail(where + ".kind", "unknown model kind '" + k + "'");
}

Json instance_to_json(const Instance& x) {
  Json values = Json::array();
  for (const auto& v : x.values) values.push_back(value_to_json(v));
  return Json{{"values", values}};
}

Instance instance_from_json(const Json& j) {
  const Json& values = need(j, "values", "instance");
  if (!values.is_array()) fail("instance.values", "expected an array");
  Instance x;
  for (std::size_t i = 0; i < values.size(); ++i)
    x.values.push_back(value_from_json(values.at(i), "instance.values[" + std::to_string(i) + "]"));
  return x;
}

Json problem_file_to_json(const FeatureSpace& space, const Model& m) {
  return Json{{"features", space_to_json(space)}, {"model", model_to_json(m)}};
}

std::pair<FeatureSpace, Model> problem_file_from_json(const Json& j) {
  FeatureSpace space = space_from_json(need(j, "features", "model file"));
  Model model = model_from_json(need(j, "model", "model file"));
  return {std::move(space), std::move(model)};
}

namespace {
Json family_to_json(const std::vector<FeatureSubset>& family) {
  Json out = Json::array();
  for (const auto& s : family) {
    Json members = Json::array();
    for (int i : s.members()) members.push_back(i);
    out.push_back(members);
  }
  return out;
}

std::vector<FeatureSubset> family_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of index arrays");
  std::vector<FeatureSubset> out;
  for (const auto& sj : j) {
    if (!sj.is_array()) fail(where, "expected an array of index arrays");
    FeatureSubset s;
    for (const auto& ij : sj) {
      if (!ij.is_number_integer()) fail(where, "subset members must be integers");
      s = s.with(ij.get<int>());
    }
    out.push_back(s);
  }
  return out;
}
}  // namespace

Json explanation_set_to_json(const ExplanationSet& es) {
  return Json{{"axps", family_to_json(es.axps)},
              {"complete", es.complete},
              {"cxps", family_to_json(es.cxps)}};
}

ExplanationSet explanation_set_from_json(const Json& j) {
  ExplanationSet es;
  es.axps = family_from_json(need(j, "axps", "explanations"), "explanations.axps");
  es.cxps = family_from_json(need(j, "cxps", "explanations"), "explanations.cxps");
  const Json& c = need(j, "complete", "explanations");
  if (!c.is_boolean()) fail("explanations.complete", "expected a boolean");
  es.complete = c.get<bool>();
  int max_index = -1;
  for (const auto& s : es.axps)
    for (int i : s.members()) max_index = std::max(max_index, i);
  for (const auto& s : es.cxps)
    for (int i : s.members()) max_index = std::max(max_index, i);
  es.n = max_index + 1;
  return es;
}

Json score_vector_to_json(const FeatureSpace& space, const ScoreVector& sv) {
  if (space.size() != sv.n()) throw ValidationError("score vector length mismatch");
  Json out = Json::object();
  for (int i = 0; i < space.size(); ++i)
    out[space.feature(i).name] = round3(sv.scores[static_cast<std::size_t>(i)]).to_double();
  return out;
}

Json ranking_to_json(const FeatureSpace& space, const Ranking& r) {
  if (space.size() != static_cast<int>(r.rank.size()))
    throw ValidationError("ranking length mismatch");
  Json out = Json::object();
  for (int i = 0; i < space.size(); ++i)
    out[space.feature(i).name] = r.rank[static_cast<std::size_t>(i)];
  return out;
}

Json attack_config_to_json(const AttackConfig& cfg) {
  Json dataset{{"count", cfg.dataset.count}, {"seed", cfg.dataset.seed}};
  if (cfg.dataset.target_in_fraction) dataset["target_in_fraction"] = *cfg.dataset.target_in_fraction;
  Json uncorrelated = Json::array();
  for (int u : cfg.spec.uncorrelated) uncorrelated.push_back(u);
  return Json{{"biased", model_to_json(cfg.spec.biased)},
              {"dataset", dataset},
              {"features", space_to_json(cfg.spec.space)},
              {"gate", model_to_json(cfg.spec.gate)},
              {"sensitive", cfg.spec.sensitive},
              {"unbiased", model_to_json(cfg.spec.unbiased)},
              {"uncorrelated", uncorrelated}};
}

AttackConfig attack_config_from_json(const Json& j) {
  FeatureSpace space = space_from_json(need(j, "features", "attack config"));
  AttackConfig out{AttackSpec{std::move(space),
                              model_from_json(need(j, "gate", "attack config"), "gate"),
                              model_from_json(need(j, "biased", "attack config"), "biased"),
                              model_from_json(need(j, "unbiased", "attack config"), "unbiased"),
                              0,
                              {}},
                   DatasetConfig{}};
  out.spec.sensitive = need_int(j, "sensitive", "attack config");
  if (out.spec.sensitive < 0 || out.spec.sensitive >= out.spec.space.size())
    fail("attack config.sensitive", "feature index out of range");
  const Json& unc = need(j, "uncorrelated", "attack config");
  if (!unc.is_array()) fail("attack config.uncorrelated", "expected an array");
  for (const auto& u : unc) {
    if (!u.is_number_integer()) fail("attack config.uncorrelated", "expected integer indices");
    int idx = u.get<int>();
    if (idx < 0 || idx >= out.spec.space.size())
      fail("attack config.uncorrelated", "feature index out of range");
    out.spec.uncorrelated.push_back(idx);
  }
  const Json& ds = need(j, "dataset", "attack config");
  out.dataset.count = need_int(ds, "count", "attack config.dataset");
  const Json& seed = need(ds, "seed", "attack config.dataset");
  if (!seed.is_number_unsigned() && !seed.is_number_integer())
    fail("attack config.dataset.seed", "expected an integer");
  out.dataset.seed = seed.get<std::uint64_t>();
  if (ds.contains("target_in_fraction")) {
    if (!ds.at("target_in_fraction").is_number())
      fail("attack config.dataset.target_in_fraction", "expected a number");
    out.dataset.target_in_fraction = ds.at("target_in_fraction").get<double>();
  }

  for (const Model* m : {&out.spec.gate, &out.spec.biased, &out.spec.unbiased}) {
    for (const auto& d : validate_diagnostics(out.spec.space, *m))
      if (d.fatal) fail("attack config", d.message);
  }
  return out;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  try {
    Json j;
    in >> j;
    return j;
  } catch (const Json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path + ": cannot open for writing");
  out << content;
  if (!out) throw ValidationError(path + ": write failed");
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace axp

#include "axp/axioms.hpp"

#include <algorithm>
#include <numeric>

namespace axp {

Family family_members_with(const Family& family, int i) {
  Family out;
  for (const auto& s : family)
    if (s.contains(i)) out.push_back(s);
  return out;
}

Aggregator builtin_aggregator(IndexKind kind) {
  return Aggregator{index_name(kind), [kind](const Family& f, int n) {
                      return family_scores(kind, f, n);
                    }};
}

RankingFunction subset_order() {
  auto contains_all = [](const Family& outer, const Family& inner) {
    for (const auto& s : inner)
      if (!std::binary_search(outer.begin(), outer.end(), s)) return false;
    return true;
  };
  return RankingFunction{
      "subset-order", [contains_all](const Family& a, const Family& b) -> std::optional<int> {
        bool ab = contains_all(b, a);
        bool ba = contains_all(a, b);
        if (ab && ba) return 0;
        if (ab) return -1;
        if (ba) return 1;
        return std::nullopt;
      }};
}

RankingFunction neg_min_size() {
  auto key = [](const Family& f) -> std::optional<int> {
    if (f.empty()) return std::nullopt;  // no explanations: lowest possible key
    int m = 1 << 30;
    for (const auto& s : f) m = std::min(m, s.count());
    return -m;
  };
  return RankingFunction{"min-size", [key](const Family& a, const Family& b) -> std::optional<int> {
                           auto ka = key(a), kb = key(b);
                           if (!ka && !kb) return 0;
                           if (!ka) return -1;
                           if (!kb) return 1;
                           if (*ka < *kb) return -1;
                           if (*ka > *kb) return 1;
                           return 0;
                         }};
}

EfficiencyTarget sum_memberships_target() {
  return EfficiencyTarget{"sum-memberships", [](const Family& f, int) {
                            std::int64_t total = 0;
                            for (const auto& s : f) total += s.count();
                            return Rational(total);
                          }};
}

EfficiencyTarget count_axps_target() {
  return EfficiencyTarget{"count", [](const Family& f, int) {
                            return Rational(static_cast<std::int64_t>(f.size()));
                          }};
}

EfficiencyTarget constant_one_target() {
  return EfficiencyTarget{"one", [](const Family&, int) { return Rational(1); }};
}

AxiomReport AxiomReport::pass(std::string axiom, std::string agg) {
  AxiomReport r;
  r.axiom = std::move(axiom);
  r.aggregator = std::move(agg);
  r.satisfied = true;
  r.replay = [] { return false; };
  return r;
}

std::vector<Family> antichain_universe(int n, int max_family_size) {
  if (n > 6) throw OracleCapError("antichain universe capped at n=6");
  std::vector<FeatureSubset> nonempty;
  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << n); ++bits)
    nonempty.push_back(FeatureSubset(bits));

  std::vector<Family> out;
  Family cur;
  auto incomparable_with_cur = [&](FeatureSubset s) {
    for (const auto& t : cur)
      if (s.subset_of(t) || t.subset_of(s)) return false;
    return true;
  };
  std::function<void(std::size_t)> rec = [&](std::size_t next) {
    Family canonical = cur;
    sort_family(canonical);
    out.push_back(std::move(canonical));
    if (static_cast<int>(cur.size()) >= max_family_size) return;
    for (std::size_t k = next; k < nonempty.size(); ++k) {
      if (!incomparable_with_cur(nonempty[k])) continue;
      cur.push_back(nonempty[k]);
      rec(k + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

Problem realize_family(const Family& family, int n) {
  std::vector<FeatureDef> feats;
  feats.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    feats.push_back(FeatureDef{"f" + std::to_string(i), {Value::integer(0), Value::integer(1)}});
  std::vector<Rule> rules;
  rules.reserve(family.size());
  for (const auto& s : family) {
    Rule r;
    for (int i : s.members()) r.conjuncts.push_back(Condition::eq(i, Value::integer(1)));
    rules.push_back(std::move(r));
  }
  Instance x;
  x.values.assign(static_cast<std::size_t>(n), Value::integer(1));
  return Problem::make(FeatureSpace(std::move(feats)), Model::rules(std::move(rules)), std::move(x));
}

namespace {

std::vector<Rational> evaluate(const Aggregator& agg, const Family& fam, int n) {
  auto scores = agg.fn(fam, n);
  if (static_cast<int>(scores.size()) != n)
    throw ContractError("aggregator '" + agg.name + "' returned " +
                        std::to_string(scores.size()) + " scores for " + std::to_string(n) +
                        " features");
  return scores;
}

struct FamilyDigest {
  std::vector<Rational> scores;
  std::vector<Family> per_feature;  // M_i for each feature
};

std::vector<FamilyDigest> digest_universe(const Aggregator& agg, const std::vector<Family>& universe,
                                          int n) {
  std::vector<FamilyDigest> out;
  out.reserve(universe.size());
  for (const auto& fam : universe) {
    FamilyDigest d;
    d.scores = evaluate(agg, fam, n);
    d.per_feature.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) d.per_feature.push_back(family_members_with(fam, i));
    out.push_back(std::move(d));
  }
  return out;
}

AxiomReport violation(std::string axiom, const Aggregator& agg, Counterexample ce,
                      std::function<bool()> replay) {
  AxiomReport r;
  r.axiom = std::move(axiom);
  r.aggregator = agg.name;
  r.satisfied = false;
  r.counterexample = std::move(ce);
  r.replay = std::move(replay);
  return r;
}

}  // namespace

AxiomReport check_monotonicity(const Aggregator& agg, const RankingFunction& alpha,
                               const std::vector<Family>& universe, int n) {
  const std::string axiom = "monotonicity(" + alpha.name + ")";
  auto digests = digest_universe(agg, universe, n);
  for (std::size_t a = 0; a < universe.size(); ++a) {
    for (std::size_t b = 0; b < universe.size(); ++b) {
      for (int i = 0; i < n; ++i) {
        const Family& ma = digests[a].per_feature[static_cast<std::size_t>(i)];
        const Family& mb = digests[b].per_feature[static_cast<std::size_t>(i)];
        const Rational& sa = digests[a].scores[static_cast<std::size_t>(i)];
        const Rational& sb = digests[b].scores[static_cast<std::size_t>(i)];

        bool bad = false;
        std::string relation;
        if (ma == mb) {
          bad = !(sa == sb);
          relation = "equal per-feature families must score equally";
        } else {
          auto cmp = alpha.compare(ma, mb);
          if (!cmp) continue;
          if (*cmp == 0) {
            bad = !(sa == sb);
            relation = "equal alpha keys must score equally";
          } else if (*cmp < 0) {
            bad = !(sa < sb);
            relation = "strictly smaller alpha key must score strictly less";
          } else {
            bad = !(sb < sa);
            relation = "strictly larger alpha key must score strictly more";
          }
        }
        if (bad) {
          Counterexample ce{universe[a], universe[b], n, i, sa, sb, relation};
          Family fa = universe[a], fb = universe[b];
          auto fn = agg.fn;
          auto cmpfn = alpha.compare;
          auto replay = [fa, fb, n, i, fn, cmpfn] {
            auto xa = fn(fa, n)[static_cast<std::size_t>(i)];
            auto xb = fn(fb, n)[static_cast<std::size_t>(i)];
            Family mia = family_members_with(fa, i), mib = family_members_with(fb, i);
            if (mia == mib) return !(xa == xb);
            auto c = cmpfn(mia, mib);
            if (!c) return false;
            if (*c == 0) return !(xa == xb);
            return *c < 0 ? !(xa < xb) : !(xb < xa);
          };
          return violation(axiom, agg, std::move(ce), std::move(replay));
        }
      }
    }
  }
  return AxiomReport::pass(axiom, agg.name);
}

namespace {

std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

Family permute_family(const Family& f, const std::vector<int>& pi) {
  Family out;
  out.reserve(f.size());
  for (const auto& s : f) {
    FeatureSubset t;
    for (int i : s.members()) t = t.with(pi[static_cast<std::size_t>(i)]);
    out.push_back(t);
  }
  sort_family(out);
  return out;
}

}  // namespace

AxiomReport check_symmetry(const Aggregator& agg, const std::vector<Family>& universe, int n) {
  const std::string axiom = "symmetry";
  auto perms = all_permutations(n);
  for (const auto& fam : universe) {
    auto base = evaluate(agg, fam, n);
    for (const auto& pi : perms) {
      Family relabeled = permute_family(fam, pi);
      auto moved = evaluate(agg, relabeled, n);
      for (int i = 0; i < n; ++i) {
        const Rational& got = moved[static_cast<std::size_t>(pi[static_cast<std::size_t>(i)])];
        const Rational& want = base[static_cast<std::size_t>(i)];
        if (!(got == want)) {
          Counterexample ce{fam, relabeled, n, i, want, got,
                            "relabeling features must relabel scores"};
          auto fn = agg.fn;
          Family f0 = fam;
          auto pic = pi;
          auto replay = [f0, pic, n, i, fn] {
            auto a = fn(f0, n)[static_cast<std::size_t>(i)];
            auto b = fn(permute_family(f0, pic),
                        n)[static_cast<std::size_t>(pic[static_cast<std::size_t>(i)])];
            return !(a == b);
          };
          return violation(axiom, agg, std::move(ce), std::move(replay));
        }
      }
    }
  }
  return AxiomReport::pass(axiom, agg.name);
}

AxiomReport check_symmetry_pipeline(const Aggregator& agg, const Problem& p, const Permutation& pi) {
  const std::string axiom = "symmetry(pipeline)";
  auto es = enumerate_explanations(p);
  auto base = evaluate(agg, es.axps, p.n());

  auto moved_problem = permute(p.space, p.model, p.instance, pi);
  auto mp = Problem::make(moved_problem.space, moved_problem.model, moved_problem.instance);
  auto mes = enumerate_explanations(mp);
  auto moved = evaluate(agg, mes.axps, p.n());

  for (int i = 0; i < p.n(); ++i) {
    const Rational& want = base[static_cast<std::size_t>(i)];
    const Rational& got = moved[static_cast<std::size_t>(pi.map[static_cast<std::size_t>(i)])];
    if (!(got == want)) {
      Counterexample ce{es.axps, mes.axps, p.n(), i, want, got,
                        "permuted pipeline must permute scores"};
      auto fn = agg.fn;
      Family fa = es.axps, fb = mes.axps;
      int j = pi.map[static_cast<std::size_t>(i)];
      int nn = p.n();
      auto replay = [fa, fb, i, j, nn, fn] {
        return !(fn(fa, nn)[static_cast<std::size_t>(i)] == fn(fb, nn)[static_cast<std::size_t>(j)]);
      };
      AxiomReport r = violation(axiom, agg, std::move(ce), std::move(replay));
      return r;
    }
  }
  return AxiomReport::pass(axiom, agg.name);
}

AxiomReport check_null_feature(const Aggregator& agg, const std::vector<Family>& universe, int n) {
  const std::string axiom = "null-feature";
  for (const auto& fam : universe) {
    auto scores = evaluate(agg, fam, n);
    for (int i = 0; i < n; ++i) {
      if (!family_members_with(fam, i).empty()) continue;
      if (!scores[static_cast<std::size_t>(i)].is_zero()) {
        Counterexample ce{fam, {}, n, i, scores[static_cast<std::size_t>(i)], Rational(0),
                          "feature absent from every explanation must score zero"};
        auto fn = agg.fn;
        Family f0 = fam;
        auto replay = [f0, i, n, fn] { return !fn(f0, n)[static_cast<std::size_t>(i)].is_zero(); };
        return violation(axiom, agg, std::move(ce), std::move(replay));
      }
    }
  }
  return AxiomReport::pass(axiom, agg.name);
}

AxiomReport check_efficiency(const Aggregator& agg, const EfficiencyTarget& target,
                             const std::vector<Family>& universe, int n) {
  const std::string axiom = "efficiency(" + target.name + ")";
  for (const auto& fam : universe) {
    auto scores = evaluate(agg, fam, n);
    Rational total(0);
    for (const auto& s : scores) total += s;
    Rational want = target.value(fam, n);
    if (!(total == want)) {
      Counterexample ce{fam, {}, n, -1, total, want, "scores must sum to the efficiency target"};
      auto fn = agg.fn;
      auto tv = target.value;
      Family f0 = fam;
      auto replay = [f0, n, fn, tv] {
        auto sc = fn(f0, n);
        Rational t(0);
        for (const auto& s : sc) t += s;
        return !(t == tv(f0, n));
      };
      return violation(axiom, agg, std::move(ce), std::move(replay));
    }
  }
  return AxiomReport::pass(axiom, agg.name);
}

AxiomReport check_unit_efficiency(const Aggregator& agg, const std::vector<Family>& universe, int n) {
  const std::string axiom = "unit-efficiency";
  for (const auto& fam : universe) {
    auto scores = evaluate(agg, fam, n);
    for (int i = 0; i < n; ++i) {
      Family mi = family_members_with(fam, i);
      if (mi.size() != 1 || mi[0] != FeatureSubset::of({i})) continue;
      if (!(scores[static_cast<std::size_t>(i)] == Rational(1))) {
        Counterexample ce{fam, {}, n, i, scores[static_cast<std::size_t>(i)], Rational(1),
                          "a feature whose only explanation is its own singleton must score 1"};
        auto fn = agg.fn;
        Family f0 = fam;
        auto replay = [f0, i, n, fn] {
          return !(fn(f0, n)[static_cast<std::size_t>(i)] == Rational(1));
        };
        return violation(axiom, agg, std::move(ce), std::move(replay));
      }
    }
  }
  return AxiomReport::pass(axiom, agg.name);
}

namespace {

struct ContractionCase {
  Rational merged;
  Rational member_sum;
  bool equality_expected;
};

ContractionCase evaluate_contraction(const Aggregator& agg, const Problem& p,
                                     const ExplanationSet& es, FeatureSubset t) {
  auto scores = evaluate(agg, es.axps, p.n());
  Rational member_sum(0);
  for (int i : t.members()) member_sum += scores[static_cast<std::size_t>(i)];

  auto cp = contract(p.space, p.model, p.instance, t);
  auto contracted = Problem::make(cp.space, cp.model, cp.instance);
  auto ces = enumerate_explanations(contracted);
  auto cscores = evaluate(agg, ces.axps, contracted.n());
  Rational merged = cscores[static_cast<std::size_t>(cp.merged_index)];

  bool t_is_axp = std::binary_search(es.axps.begin(), es.axps.end(), t);
  bool smallest_for_all = t_is_axp;
  if (t_is_axp) {
    for (int i : t.members()) {
      int best = 1 << 30;
      for (const auto& s : family_members_with(es.axps, i)) best = std::min(best, s.count());
      if (best != t.count()) { smallest_for_all = false; break; }
    }
  }
  return ContractionCase{merged, member_sum, smallest_for_all};
}

}  // namespace

AxiomReport check_contraction(const Aggregator& agg, const Problem& p, FeatureSubset t) {
  const std::string axiom = "contraction";
  auto es = enumerate_explanations(p);
  for (int i : t.members())
    if (family_members_with(es.axps, i).empty())
      throw ContractError("contraction check requires T without null features");

  auto c = evaluate_contraction(agg, p, es, t);
  bool bad = c.member_sum < c.merged || (c.equality_expected && !(c.merged == c.member_sum));
  if (!bad) return AxiomReport::pass(axiom, agg.name);

  Counterexample ce{es.axps, {}, p.n(), -1, c.merged, c.member_sum,
                    c.equality_expected ? "merged score must equal the member sum"
                                        : "merged score must not exceed the member sum"};
  auto fn = agg;
  FeatureSpace space = p.space;
  Model model = p.model;
  Instance x = p.instance;
  auto replay = [fn, space, model, x, t] {
    auto p2 = Problem::make(space, model, x);
    auto es2 = enumerate_explanations(p2);
    auto c2 = evaluate_contraction(fn, p2, es2, t);
    return c2.member_sum < c2.merged || (c2.equality_expected && !(c2.merged == c2.member_sum));
  };
  return violation(axiom, agg, std::move(ce), std::move(replay));
}

AxiomReport check_contraction_universe(const Aggregator& agg, const std::vector<Family>& universe,
                                       int n) {
  const std::string axiom = "contraction";
  for (const auto& fam : universe) {
    if (fam.empty()) continue;  // every feature is null, no valid T
    FeatureSubset non_null;
    for (int i = 0; i < n; ++i)
      if (!family_members_with(fam, i).empty()) non_null = non_null.with(i);

    auto p = realize_family(fam, n);
    ExplanationSet es;
    es.axps = fam;
    es.n = n;
    es.complete = true;

    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      FeatureSubset t(bits);
      if (t.count() < 2 || !t.subset_of(non_null)) continue;
      auto c = evaluate_contraction(agg, p, es, t);
      bool bad = c.member_sum < c.merged || (c.equality_expected && !(c.merged == c.member_sum));
      if (bad) {
        Counterexample ce{fam, {t}, n, -1, c.merged, c.member_sum,
                          c.equality_expected ? "merged score must equal the member sum"
                                              : "merged score must not exceed the member sum"};
        auto fn = agg;
        Family f0 = fam;
        auto replay = [fn, f0, n, t] {
          auto p2 = realize_family(f0, n);
          ExplanationSet es2;
          es2.axps = f0;
          es2.n = n;
          es2.complete = true;
          auto c2 = evaluate_contraction(fn, p2, es2, t);
          return c2.member_sum < c2.merged ||
                 (c2.equality_expected && !(c2.merged == c2.member_sum));
        };
        return violation(axiom, agg, std::move(ce), std::move(replay));
      }
    }
  }
  return AxiomReport::pass(axiom, agg.name);
}

AxiomMatrix run_axiom_matrix(const std::vector<Aggregator>& aggs, int universe_n,
                             int max_family_size) {
  auto universe = antichain_universe(universe_n, max_family_size);
  AxiomMatrix m;
  m.axioms = {"monotonicity(subset-order)", "monotonicity(min-size)", "symmetry", "null-feature",
              "efficiency(sum-memberships)", "efficiency(count)", "efficiency(one)",
              "unit-efficiency", "contraction"};
  for (const auto& agg : aggs) {
    auto& row = m.by_aggregator[agg.name];
    row["monotonicity(subset-order)"] = check_monotonicity(agg, subset_order(), universe, universe_n);
    row["monotonicity(min-size)"] = check_monotonicity(agg, neg_min_size(), universe, universe_n);
    row["symmetry"] = check_symmetry(agg, universe, universe_n);
    row["null-feature"] = check_null_feature(agg, universe, universe_n);
    row["efficiency(sum-memberships)"] =
        check_efficiency(agg, sum_memberships_target(), universe, universe_n);
    row["efficiency(count)"] = check_efficiency(agg, count_axps_target(), universe, universe_n);
    row["efficiency(one)"] = check_efficiency(agg, constant_one_target(), universe, universe_n);
    row["unit-efficiency"] = check_unit_efficiency(agg, universe, universe_n);
    row["contraction"] = check_contraction_universe(agg, universe, universe_n);
  }
  return m;
}

ImpossibilityTranscript demonstrate_impossibility(const EfficiencyTarget& target) {
  ImpossibilityTranscript t;
  const int n = 4;
  Family a = {FeatureSubset::of({0, 1})};
  Family b = {FeatureSubset::of({0, 1}), FeatureSubset::of({2, 3})};

  Rational ca = target.value(a, n);
  Rational half = ca / Rational(2);
  t.steps.push_back("on M = {{0,1}}: Null Feature zeroes features 2 and 3");
  t.steps.push_back("on M = {{0,1}}: Symmetry under the swap (0 1) forces score(0) = score(1)");
  t.steps.push_back("on M = {{0,1}}: " + target.name + "-Efficiency forces score(0) + score(1) = " +
                    ca.str() + ", so both equal " + half.str());
  t.steps.push_back("relabeling by (0->2, 1->3) and Symmetry give the same scores " + half.str() +
                    " to features 2 and 3 on M = {{2,3}}");
  t.steps.push_back("on M = {{0,1},{2,3}}: each feature's containing family is unchanged, so "
                    "Minimal Monotonicity pins every score at " + half.str());

  for (int i = 0; i < n; ++i) t.forced[i] = half;
  t.forced_sum = half * Rational(4);
  t.required = target.value(b, n);
  t.contradiction = !(t.forced_sum == t.required);
  t.final_line = "forced sum = " + t.forced_sum.str() + ", required = " + t.required.str() +
                 (t.contradiction ? ", contradiction" : ", consistent");
  t.steps.push_back(t.final_line);
  return t;
}

UniquenessResult uniqueness_check(const Aggregator& candidate, IndexKind builtin, int universe_n) {
  auto universe = antichain_universe(universe_n);
  UniquenessResult r;
  r.aggregator = candidate.name;
  r.builtin = index_name(builtin);

  std::vector<AxiomReport> reports;
  switch (builtin) {
    case IndexKind::HollerPackel:
      reports.push_back(check_monotonicity(candidate, subset_order(), universe, universe_n));
      reports.push_back(check_symmetry(candidate, universe, universe_n));
      reports.push_back(check_null_feature(candidate, universe, universe_n));
      reports.push_back(check_efficiency(candidate, sum_memberships_target(), universe, universe_n));
      break;
    case IndexKind::DeeganPackel:
      reports.push_back(check_monotonicity(candidate, subset_order(), universe, universe_n));
      reports.push_back(check_symmetry(candidate, universe, universe_n));
      reports.push_back(check_null_feature(candidate, universe, universe_n));
      reports.push_back(check_efficiency(candidate, count_axps_target(), universe, universe_n));
      break;
    case IndexKind::Responsibility:
      reports.push_back(check_monotonicity(candidate, neg_min_size(), universe, universe_n));
      reports.push_back(check_unit_efficiency(candidate, universe, universe_n));
      reports.push_back(check_contraction_universe(candidate, universe, universe_n));
      reports.push_back(check_symmetry(candidate, universe, universe_n));
      reports.push_back(check_null_feature(candidate, universe, universe_n));
      break;
  }

  r.passes_all = true;
  for (const auto& rep : reports) {
    if (!rep.satisfied) {
      r.passes_all = false;
      r.failed_axiom = rep.axiom;
      break;
    }
  }
  if (!r.passes_all) return r;

  auto ref = builtin_aggregator(builtin);
  r.agrees_with_builtin = true;
  for (const auto& fam : universe) {
    auto got = evaluate(candidate, fam, universe_n);
    auto want = evaluate(ref, fam, universe_n);
    if (got != want) {
      r.agrees_with_builtin = false;
      break;
    }
  }
  return r;
}

}  // namespace axp

#include <doctest.h>

#include "helpers.hpp"

using namespace axp;
using axptest::fam;
using axptest::fs;

namespace {

// independent reformulations of the built-ins, used by the uniqueness probe
Aggregator hit_count_audit() {
  return {"hit-count-audit", [](const Family& f, int n) {
            std::vector<Rational> out;
            for (int i = 0; i < n; ++i) {
              std::int64_t hits = 0;
              for (const auto& s : f)
                if (s.contains(i)) ++hits;
              out.push_back(Rational(hits));
            }
            return out;
          }};
}

Aggregator size_weighted_audit() {
  return {"size-weighted-audit", [](const Family& f, int n) {
            std::vector<Rational> out(static_cast<std::size_t>(n), Rational(0));
            for (int i = 0; i < n; ++i)
              for (const auto& s : family_members_with(f, i))
                out[static_cast<std::size_t>(i)] += Rational(1, s.count());
            return out;
          }};
}

Aggregator min_size_audit() {
  return {"min-size-audit", [](const Family& f, int n) {
            std::vector<Rational> out(static_cast<std::size_t>(n), Rational(0));
            for (int i = 0; i < n; ++i) {
              int best = 0;
              for (const auto& s : f)
                if (s.contains(i) && (best == 0 || s.count() < best)) best = s.count();
              if (best > 0) out[static_cast<std::size_t>(i)] = Rational(1, best);
            }
            return out;
          }};
}

Aggregator constant_one() {
  return {"constant-one", [](const Family&, int n) {
            return std::vector<Rational>(static_cast<std::size_t>(n), Rational(1));
          }};
}

Aggregator position_biased() {
  return {"position-biased", [](const Family& f, int n) {
            auto s = family_scores(IndexKind::HollerPackel, f, n);
            for (int i = 0; i < n; ++i)
              s[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i)] * Rational(i);
            return s;
          }};
}

Aggregator half_hp() {
  return {"half-hp", [](const Family& f, int n) {
            auto s = family_scores(IndexKind::HollerPackel, f, n);
            for (auto& v : s) v = v * Rational(1, 2);
            return s;
          }};
}

Aggregator squared_dp() {
  return {"squared-dp", [](const Family& f, int n) {
            std::vector<Rational> s(static_cast<std::size_t>(n), Rational(0));
            for (const auto& sub : f)
              for (int i : sub.members())
                s[static_cast<std::size_t>(i)] +=
                    Rational(1, static_cast<std::int64_t>(sub.count()) * sub.count());
            return s;
          }};
}

}  // namespace

TEST_CASE("antichain universe") {
  SUBCASE("two features yield exactly the five realizable families") {
    auto u = antichain_universe(2);
    REQUIRE(u.size() == 5);
    CHECK(std::find(u.begin(), u.end(), fam({})) != u.end());
    CHECK(std::find(u.begin(), u.end(), fam({{0}})) != u.end());
    CHECK(std::find(u.begin(), u.end(), fam({{1}})) != u.end());
    CHECK(std::find(u.begin(), u.end(), fam({{0, 1}})) != u.end());
    CHECK(std::find(u.begin(), u.end(), fam({{0}, {1}})) != u.end());
  }

  SUBCASE("no family contains a set and its superset") {
    for (const auto& f : antichain_universe(4)) {
      for (std::size_t a = 0; a < f.size(); ++a)
        for (std::size_t b = 0; b < f.size(); ++b)
          if (a != b) CHECK_FALSE(f[a].subset_of(f[b]));
      for (const auto& s : f) CHECK_FALSE(s.empty());
    }
  }

  SUBCASE("count matches an independent filter of all families") {
    for (int n : {2, 3}) {
      // every subset of the 2^n - 1 nonempty subsets, kept iff pairwise incomparable
      std::vector<FeatureSubset> nonempty;
      for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << n); ++bits)
        nonempty.push_back(FeatureSubset(bits));
      std::size_t expected = 0;
      for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << nonempty.size()); ++pick) {
        bool antichain = true;
        for (std::size_t a = 0; a < nonempty.size() && antichain; ++a)
          for (std::size_t b = 0; b < nonempty.size() && antichain; ++b)
            if (a != b && ((pick >> a) & 1u) && ((pick >> b) & 1u) &&
                nonempty[a].subset_of(nonempty[b]))
              antichain = false;
        if (antichain) ++expected;
      }
      CHECK(antichain_universe(n).size() == expected);
    }
    // the three-feature count is stable and worth pinning
    CHECK(antichain_universe(3).size() == 19);
  }

  SUBCASE("family size cap prunes the stream") {
    for (const auto& f : antichain_universe(3, 1)) CHECK(f.size() <= 1);
  }
}

TEST_CASE("every universe family is realizable by an actual model") {
  for (const auto& f : antichain_universe(3)) {
    auto p = realize_family(f, 3);
    auto es = enumerate_bruteforce(p);
    if (f.empty()) {
      CHECK(es.axps == fam({{}}));  // the constant model's sole explanation
    } else {
      CHECK(es.axps == f);
    }
  }
}

TEST_CASE("monotonicity checks") {
  auto universe = antichain_universe(4);
  auto hp = builtin_aggregator(IndexKind::HollerPackel);
  auto dp = builtin_aggregator(IndexKind::DeeganPackel);
  auto resp = builtin_aggregator(IndexKind::Responsibility);

  CHECK(check_monotonicity(hp, subset_order(), universe, 4).satisfied);
  CHECK(check_monotonicity(dp, subset_order(), universe, 4).satisfied);
  CHECK(check_monotonicity(resp, neg_min_size(), universe, 4).satisfied);

  SUBCASE("responsibility ignores extra equally-small explanations") {
    auto report = check_monotonicity(resp, subset_order(), universe, 4);
    REQUIRE_FALSE(report.satisfied);
    REQUIRE(report.counterexample.has_value());
    CHECK(report.replay());
  }

  SUBCASE("counting indices are not minimum-size monotone") {
    CHECK_FALSE(check_monotonicity(hp, neg_min_size(), universe, 4).satisfied);
    CHECK_FALSE(check_monotonicity(dp, neg_min_size(), universe, 4).satisfied);
  }
}

TEST_CASE("symmetry checks") {
  auto universe = antichain_universe(4);
  for (auto kind : {IndexKind::HollerPackel, IndexKind::DeeganPackel, IndexKind::Responsibility})
    CHECK(check_symmetry(builtin_aggregator(kind), universe, 4).satisfied);

  auto biased = check_symmetry(position_biased(), universe, 4);
  REQUIRE_FALSE(biased.satisfied);
  CHECK(biased.replay());
}

TEST_CASE("pipeline symmetry on the loan fixture") {
  auto p = axptest::load_problem("loan_f.model.json", "loan_reject.instance.json");
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      auto pi = Permutation::transposition(4, a, b);
      for (auto kind : {IndexKind::HollerPackel, IndexKind::DeeganPackel, IndexKind::Responsibility})
        CHECK(check_symmetry_pipeline(builtin_aggregator(kind), p, pi).satisfied);
    }
  CHECK(check_symmetry_pipeline(builtin_aggregator(IndexKind::HollerPackel), p,
                                Permutation::identity(4))
            .satisfied);
  CHECK_FALSE(check_symmetry_pipeline(position_biased(), p, Permutation::transposition(4, 0, 3))
                  .satisfied);
}

TEST_CASE("null feature checks") {
  auto universe = antichain_universe(4);
  for (auto kind : {IndexKind::HollerPackel, IndexKind::DeeganPackel, IndexKind::Responsibility})
    CHECK(check_null_feature(builtin_aggregator(kind), universe, 4).satisfied);

  auto report = check_null_feature(constant_one(), universe, 4);
  REQUIRE_FALSE(report.satisfied);
  CHECK(report.replay());

  SUBCASE("the empty family scores everyone zero") {
    for (auto kind : {IndexKind::HollerPackel, IndexKind::DeeganPackel, IndexKind::Responsibility})
      for (const auto& s : family_scores(kind, {}, 4)) CHECK(s == Rational(0));
  }
}

TEST_CASE("efficiency checks") {
  auto universe = antichain_universe(4);
  auto hp = builtin_aggregator(IndexKind::HollerPackel);
  auto dp = builtin_aggregator(IndexKind::DeeganPackel);

  CHECK(check_efficiency(hp, sum_memberships_target(), universe, 4).satisfied);
  CHECK(check_efficiency(dp, count_axps_target(), universe, 4).satisfied);

  SUBCASE("constant-1 efficiency fails, e.g. on two disjoint pairs") {
    auto report = check_efficiency(dp, constant_one_target(), universe, 4);
    REQUIRE_FALSE(report.satisfied);
    CHECK(report.replay());
    // the two-pair family from the derivation sums to 2, not 1
    auto scores = dp.fn(fam({{0, 1}, {2, 3}}), 4);
    Rational total(0);
    for (const auto& s : scores) total += s;
    CHECK(total == Rational(2));
  }
}

TEST_CASE("unit efficiency checks") {
  auto universe = antichain_universe(4);
  CHECK(check_unit_efficiency(builtin_aggregator(IndexKind::Responsibility), universe, 4).satisfied);
  CHECK(check_unit_efficiency(builtin_aggregator(IndexKind::HollerPackel), universe, 4).satisfied);

  auto report = check_unit_efficiency(half_hp(), universe, 4);
  REQUIRE_FALSE(report.satisfied);
  CHECK(report.replay());
}

TEST_CASE("contraction checks") {
  auto resp = builtin_aggregator(IndexKind::Responsibility);

  SUBCASE("equality when the merged pair is the least explanation for both members") {
    auto p = axptest::load_problem("loan_f.model.json", "loan_reject.instance.json");
    CHECK(check_contraction(resp, p, fs({0, 2})).satisfied);  // Age + Credit

    auto es = enumerate_explanations(p);
    auto cp = contract(p.space, p.model, p.instance, fs({0, 2}));
    auto ces = enumerate_explanations(Problem::make(cp.space, cp.model, cp.instance));
    auto merged_scores = resp.fn(ces.axps, cp.space.size());
    auto original = resp.fn(es.axps, 4);
    CHECK(merged_scores[static_cast<std::size_t>(cp.merged_index)] == Rational(1));
    CHECK(original[0] + original[2] == Rational(1));
  }

  SUBCASE("equality on the accepted applicant's age-purpose pair") {
    auto p = axptest::load_problem("loan_simple.model.json", "loan_simple.instance.json");
    CHECK(check_contraction(resp, p, fs({0, 1})).satisfied);
  }

  SUBCASE("a null feature in T is a contract violation") {
    auto p = axptest::load_problem("loan_g.model.json", "loan_reject.instance.json");
    CHECK_THROWS_AS(check_contraction(resp, p, fs({0, 1})), ContractError);  // Purpose is null
  }

  SUBCASE("randomized models never break the inequality") {
    SplitMix64 rng(113);
    RandomModelOptions opt;
    opt.max_features = 5;
    int tried = 0;
    for (int trial = 0; trial < 300 && tried < 40; ++trial) {
      auto p = random_problem(rng, opt);
      auto es = enumerate_explanations(p);
      FeatureSubset non_null;
      for (int i = 0; i < p.n(); ++i)
        if (!family_members_with(es.axps, i).empty()) non_null = non_null.with(i);
      if (non_null.count() < 2) continue;
      auto members = non_null.members();
      FeatureSubset t = fs({members[0], members[1]});
      if (members.size() > 2 && rng.below(2)) t = t.with(members[2]);
      CHECK(check_contraction(resp, p, t).satisfied);
      ++tried;
    }
    CHECK(tried >= 20);
  }

  SUBCASE("quantified over the realized universe") {
    auto universe = antichain_universe(3);
    CHECK(check_contraction_universe(resp, universe, 3).satisfied);
    // the counting index overshoots the equality case, e.g. on one pair
    auto hp_report = check_contraction_universe(builtin_aggregator(IndexKind::HollerPackel),
                                                universe, 3);
    REQUIRE_FALSE(hp_report.satisfied);
    CHECK(hp_report.replay());
  }
}

TEST_CASE("characterizing columns of the axiom matrix") {
  auto matrix = run_axiom_matrix({builtin_aggregator(IndexKind::HollerPackel),
                                  builtin_aggregator(IndexKind::DeeganPackel),
                                  builtin_aggregator(IndexKind::Responsibility)},
                                 4);

  const auto& hp = matrix.by_aggregator.at("holler_packel");
  CHECK(hp.at("monotonicity(subset-order)").satisfied);
  CHECK(hp.at("symmetry").satisfied);
  CHECK(hp.at("null-feature").satisfied);
  CHECK(hp.at("efficiency(sum-memberships)").satisfied);

  const auto& dp = matrix.by_aggregator.at("deegan_packel");
  CHECK(dp.at("monotonicity(subset-order)").satisfied);
  CHECK(dp.at("symmetry").satisfied);
  CHECK(dp.at("null-feature").satisfied);
  CHECK(dp.at("efficiency(count)").satisfied);

  const auto& resp = matrix.by_aggregator.at("responsibility");
  CHECK(resp.at("monotonicity(min-size)").satisfied);
  CHECK(resp.at("unit-efficiency").satisfied);
  CHECK(resp.at("contraction").satisfied);
  CHECK(resp.at("symmetry").satisfied);
  CHECK(resp.at("null-feature").satisfied);
}

TEST_CASE("impossibility derivation") {
  auto t = demonstrate_impossibility();
  CHECK(t.contradiction);
  CHECK(t.final_line == "forced sum = 2, required = 1, contradiction");
  REQUIRE(t.forced.size() == 4);
  for (const auto& [i, v] : t.forced) {
    CHECK(i >= 0);
    CHECK(i < 4);
    CHECK(v == Rational(1, 2));
  }

  SUBCASE("the totals the built-ins use stay consistent") {
    auto sum = demonstrate_impossibility(sum_memberships_target());
    CHECK_FALSE(sum.contradiction);
    CHECK(sum.forced_sum == sum.required);
    auto count = demonstrate_impossibility(count_axps_target());
    CHECK_FALSE(count.contradiction);
    CHECK(count.forced_sum == count.required);
  }
}

TEST_CASE("uniqueness spot checks on the three-feature universe") {
  SUBCASE("independent reformulations pass and coincide with the built-ins") {
    auto r1 = uniqueness_check(hit_count_audit(), IndexKind::HollerPackel, 3);
    CHECK(r1.passes_all);
    CHECK(r1.agrees_with_builtin);

    auto r2 = uniqueness_check(size_weighted_audit(), IndexKind::DeeganPackel, 3);
    CHECK(r2.passes_all);
    CHECK(r2.agrees_with_builtin);

    auto r3 = uniqueness_check(min_size_audit(), IndexKind::Responsibility, 3);
    CHECK(r3.passes_all);
    CHECK(r3.agrees_with_builtin);
  }

  SUBCASE("perturbed candidates are caught by an axiom") {
    auto hp_for_dp = uniqueness_check(builtin_aggregator(IndexKind::HollerPackel),
                                      IndexKind::DeeganPackel, 3);
    CHECK_FALSE(hp_for_dp.passes_all);
    CHECK(hp_for_dp.failed_axiom == "efficiency(count)");

    auto squared = uniqueness_check(squared_dp(), IndexKind::DeeganPackel, 3);
    CHECK_FALSE(squared.passes_all);

    auto resp_for_hp = uniqueness_check(builtin_aggregator(IndexKind::Responsibility),
                                        IndexKind::HollerPackel, 3);
    CHECK_FALSE(resp_for_hp.passes_all);

    auto half = uniqueness_check(half_hp(), IndexKind::Responsibility, 3);
    CHECK_FALSE(half.passes_all);

    auto biased = uniqueness_check(position_biased(), IndexKind::HollerPackel, 3);
    CHECK_FALSE(biased.passes_all);
  }
}

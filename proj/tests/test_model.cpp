#include <doctest.h>

#include "helpers.hpp"

using namespace axp;
using axptest::fs;

namespace {

FeatureSpace tiny_space() {
  return FeatureSpace{{FeatureDef{"a", {Value::integer(0), Value::integer(1)}},
                       FeatureDef{"b", {Value::integer(0), Value::integer(1), Value::integer(2)}}}};
}

}  // namespace

TEST_CASE("predict on the loan rule set") {
  auto p = axptest::load_problem("loan_simple.model.json", "loan_simple.instance.json");
  CHECK(p.prediction == 1);
  CHECK(predict(p.space, p.model, p.instance) == 1);

  SUBCASE("an empty rule set rejects everything") {
    auto empty = Model::rules({});
    CHECK(predict(p.space, empty, p.instance) == 0);
  }

  SUBCASE("the four-rule variant rejects the fixture applicant") {
    auto q = axptest::load_problem("loan_f.model.json", "loan_reject.instance.json");
    CHECK(q.prediction == 0);
  }

  SUBCASE("prediction is deterministic") {
    for (int k = 0; k < 5; ++k) CHECK(predict(p.space, p.model, p.instance) == 1);
  }
}

TEST_CASE("predict rejects values outside the domain, naming the feature") {
  auto p = axptest::load_problem("loan_simple.model.json", "loan_simple.instance.json");
  Instance bad = p.instance;
  bad.values[2] = Value::integer(9999);
  CHECK_THROWS_WITH_AS(predict(p.space, p.model, bad),
                       doctest::Contains("Credit"), ValidationError);
}

TEST_CASE("validate") {
  auto p = axptest::load_problem("loan_f.model.json", "loan_reject.instance.json");

  SUBCASE("well-formed model yields no diagnostics") {
    CHECK(validate(p.space, p.model).empty());
  }

  SUBCASE("out-of-range feature index is one diagnostic") {
    auto bad = Model::rules({Rule{{Condition::eq(4, Value::integer(0))}}});
    auto diags = validate(p.space, bad);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("out of range") != std::string::npos);
  }

  SUBCASE("contradictory tree path is flagged dead") {
    // Age > 30 and then Age < 20 within the true branch
    auto tree = Model::tree({TreeNode::internal(Condition::gt(0, 30), 1, 2),
                             TreeNode::internal(Condition::lt(0, 20), 3, 4),
                             TreeNode::leaf(0), TreeNode::leaf(1), TreeNode::leaf(0)});
    auto diags = validate(p.space, tree);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("dead path") != std::string::npos);
  }

  SUBCASE("ordered comparator on a symbolic feature is fatal") {
    auto bad = Model::rules({Rule{{Condition::gt(1, 3)}}});
    auto diags = validate_diagnostics(p.space, bad);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].fatal);
    CHECK(diags[0].message.find("unordered") != std::string::npos);
  }

  SUBCASE("tree cycles are fatal") {
    auto cyclic = Model::tree({TreeNode::internal(Condition::gt(0, 30), 0, 1), TreeNode::leaf(0)});
    auto diags = validate_diagnostics(p.space, cyclic);
    REQUIRE(!diags.empty());
    CHECK(diags[0].fatal);
    CHECK(diags[0].message.find("cycle") != std::string::npos);
  }
}

TEST_CASE("permutations") {
  CHECK_THROWS_AS(Permutation({0, 0, 1}), ValidationError);
  CHECK_THROWS_AS(Permutation({0, 2}), ValidationError);

  auto p = axptest::load_problem("loan_simple.model.json", "loan_simple.instance.json");

  SUBCASE("identity permutation leaves everything in place") {
    auto moved = permute(p.space, p.model, p.instance, Permutation::identity(4));
    CHECK(model_to_json(moved.model) == model_to_json(p.model));
    CHECK(instance_to_json(moved.instance) == instance_to_json(p.instance));
    CHECK(space_to_json(moved.space) == space_to_json(p.space));
  }

  SUBCASE("swapping 0 and 1 relabels the age condition") {
    auto moved = permute(p.space, p.model, p.instance, Permutation::transposition(4, 0, 1));
    const auto& rules = std::get<RuleSetModel>(moved.model.repr).rules;
    CHECK(rules[0].conjuncts[0].feature == 1);  // Age > 20 now reads index 1
    CHECK(moved.space.feature(1).name == "Age");
    CHECK(predict(moved.space, moved.model, moved.instance) == 1);
  }

  SUBCASE("permutation preserves predictions on every instance") {
    SplitMix64 rng(41);
    RandomModelOptions opt;
    opt.max_features = 5;
    for (int trial = 0; trial < 25; ++trial) {
      auto rp = random_problem(rng, opt);
      std::vector<int> mapping(static_cast<std::size_t>(rp.n()));
      for (int i = 0; i < rp.n(); ++i) mapping[static_cast<std::size_t>(i)] = i;
      for (int i = rp.n() - 1; i > 0; --i)
        std::swap(mapping[static_cast<std::size_t>(i)],
                  mapping[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
      Permutation pi(mapping);
      auto moved = permute(rp.space, rp.model, rp.instance, pi);

      std::vector<int> ranks(static_cast<std::size_t>(rp.n()), 0);
      for (;;) {
        Instance x = instance_from_ranks(rp.space, ranks);
        auto moved_x = permute(rp.space, rp.model, x, pi).instance;
        CHECK(predict(rp.space, rp.model, x) == predict(moved.space, moved.model, moved_x));
        int k = 0;
        for (; k < rp.n(); ++k) {
          if (++ranks[static_cast<std::size_t>(k)] < rp.space.feature(k).cardinality()) break;
          ranks[static_cast<std::size_t>(k)] = 0;
        }
        if (k == rp.n()) break;
      }
    }
  }

  SUBCASE("applying a permutation and its inverse round-trips the model") {
    SplitMix64 rng(43);
    RandomModelOptions opt;
    opt.max_features = 6;
    for (int trial = 0; trial < 25; ++trial) {
      auto rp = random_problem(rng, opt);
      auto pi = Permutation::transposition(rp.n(), 0, rp.n() - 1);
      auto once = permute(rp.space, rp.model, rp.instance, pi);
      auto back = permute(once.space, once.model, once.instance, pi.inverse());
      CHECK(model_to_json(back.model) == model_to_json(rp.model));
      CHECK(instance_to_json(back.instance) == instance_to_json(rp.instance));
      CHECK(space_to_json(back.space) == space_to_json(rp.space));
    }
  }
}

TEST_CASE("contraction") {
  SUBCASE("needs at least two in-range features") {
    auto space = tiny_space();
    auto model = Model::rules({Rule{{Condition::eq(0, Value::integer(1))}}});
    Instance x{{Value::integer(1), Value::integer(0)}};
    CHECK_THROWS_AS(contract(space, model, x, fs({0})), ValidationError);
    CHECK_THROWS_AS(contract(space, model, x, fs({0, 5})), ValidationError);
  }

  SUBCASE("merged feature domain is the member product") {
    auto p = axptest::load_problem("loan_simple.model.json", "loan_simple.instance.json");
    auto cp = contract(p.space, p.model, p.instance, fs({0, 1}));
    CHECK(cp.space.size() == 3);
    CHECK(cp.space.feature(cp.merged_index).name == "[Age+Purpose]");
    CHECK(cp.space.feature(cp.merged_index).cardinality() == 4);  // 2 ages x 2 purposes
    CHECK(cp.instance.values[static_cast<std::size_t>(cp.merged_index)].str() == "30|Education");
  }

  SUBCASE("the merged pair is itself a minimal sufficient set") {
    auto p = axptest::load_problem("loan_simple.model.json", "loan_simple.instance.json");
    auto cp = contract(p.space, p.model, p.instance, fs({0, 1}));
    auto contracted = Problem::make(cp.space, cp.model, cp.instance);
    auto es = enumerate_bruteforce(contracted);
    FeatureSubset merged_only = FeatureSubset::of({cp.merged_index});
    CHECK(std::find(es.axps.begin(), es.axps.end(), merged_only) != es.axps.end());
  }

  SUBCASE("contracting everything leaves one decisive feature") {
    auto p = axptest::load_problem("loan_simple.model.json", "loan_simple.instance.json");
    auto cp = contract(p.space, p.model, p.instance, FeatureSubset::full(4));
    auto contracted = Problem::make(cp.space, cp.model, cp.instance);
    CHECK(contracted.n() == 1);
    auto es = enumerate_bruteforce(contracted);
    REQUIRE(es.axps.size() == 1);
    CHECK(es.axps[0] == fs({0}));
  }

  SUBCASE("contraction preserves predictions on every instance") {
    SplitMix64 rng(47);
    RandomModelOptions opt;
    opt.max_features = 5;
    for (int trial = 0; trial < 25; ++trial) {
      auto rp = random_problem(rng, opt);
      FeatureSubset t = fs({0, 1});
      if (rng.below(2) && rp.n() >= 3) t = t.with(2);
      auto cp = contract(rp.space, rp.model, rp.instance, t);

      std::vector<int> ranks(static_cast<std::size_t>(rp.n()), 0);
      for (;;) {
        Instance x = instance_from_ranks(rp.space, ranks);
        Instance cx = contract_instance(rp.space, cp, t, x);
        CHECK(predict(rp.space, rp.model, x) == predict(cp.space, cp.model, cx));
        int k = 0;
        for (; k < rp.n(); ++k) {
          if (++ranks[static_cast<std::size_t>(k)] < rp.space.feature(k).cardinality()) break;
          ranks[static_cast<std::size_t>(k)] = 0;
        }
        if (k == rp.n()) break;
      }
    }
  }
}

TEST_CASE("the value interpreter and the compiled evaluator agree everywhere") {
  SplitMix64 rng(151);
  RandomModelOptions opt;
  opt.max_features = 5;
  opt.max_domain = 4;
  for (int trial = 0; trial < 40; ++trial) {
    auto p = random_problem(rng, opt);
    std::vector<int> ranks(static_cast<std::size_t>(p.n()), 0);
    for (;;) {
      CHECK(predict(p.space, p.model, instance_from_ranks(p.space, ranks)) ==
            predict_ranks(p.compiled, ranks));
      int k = 0;
      for (; k < p.n(); ++k) {
        if (++ranks[static_cast<std::size_t>(k)] < p.space.feature(k).cardinality()) break;
        ranks[static_cast<std::size_t>(k)] = 0;
      }
      if (k == p.n()) break;
    }
  }
}

TEST_CASE("feature space invariants") {
  CHECK_THROWS_AS(FeatureSpace({FeatureDef{"x", {}}}), ValidationError);
  CHECK_THROWS_AS(FeatureSpace({FeatureDef{"x", {Value::integer(0)}},
                                FeatureDef{"x", {Value::integer(0)}}}),
                  ValidationError);
  CHECK_THROWS_AS(FeatureSpace({FeatureDef{"x", {Value::integer(0), Value::integer(0)}}}),
                  ValidationError);
}

#include <doctest.h>

#include "helpers.hpp"

using namespace axp;
using axptest::fs;

namespace {

AttackConfig load_compas_like() {
  return attack_config_from_json(load_json_file(axptest::fixture("compas_like.attack.json")));
}

}  // namespace

TEST_CASE("compose_attack dispatches on the gate") {
  auto cfg = load_compas_like();
  auto composite = compose_attack(cfg.spec);

  // all nominal bins: in-distribution, so the sensitive feature decides
  Instance in_dist{{Value::integer(1), Value::integer(0), Value::integer(0), Value::integer(1),
                    Value::integer(1), Value::integer(1), Value::integer(0), Value::integer(0),
                    Value::integer(1)}};
  CHECK(predict(cfg.spec.space, cfg.spec.gate, in_dist) == 1);
  CHECK(predict(cfg.spec.space, composite, in_dist) ==
        predict(cfg.spec.space, cfg.spec.biased, in_dist));
  CHECK(predict(cfg.spec.space, composite, in_dist) == 1);

  // all three screened features at their extreme bin: out-of-distribution
  Instance out_dist{{Value::integer(1), Value::integer(1), Value::integer(0), Value::integer(2),
                     Value::integer(2), Value::integer(2), Value::integer(0), Value::integer(0),
                     Value::integer(1)}};
  CHECK(predict(cfg.spec.space, cfg.spec.gate, out_dist) == 0);
  CHECK(predict(cfg.spec.space, composite, out_dist) ==
        predict(cfg.spec.space, cfg.spec.unbiased, out_dist));
}

TEST_CASE("the composite always answers with the dispatched sub-model") {
  auto cfg = load_compas_like();
  auto composite = compose_attack(cfg.spec);
  DatasetConfig mixed{17, 80, 0.5};
  for (const auto& point : generate_dataset(cfg.spec, mixed).points) {
    const Model& routed =
        predict(cfg.spec.space, cfg.spec.gate, point) == 1 ? cfg.spec.biased : cfg.spec.unbiased;
    CHECK(predict(cfg.spec.space, composite, point) == predict(cfg.spec.space, routed, point));
  }
}

TEST_CASE("compose_attack refuses a leaky biased model") {
  auto cfg = load_compas_like();
  // secretly also reads uc1
  cfg.spec.biased = Model::rules({Rule{{Condition::eq(0, Value::integer(1))}},
                                  Rule{{Condition::eq(1, Value::integer(1))}}});
  CHECK_THROWS_WITH_AS(compose_attack(cfg.spec), doctest::Contains("uc1"), ValidationError);

  auto cfg2 = load_compas_like();
  // unbiased model peeking at the sensitive feature
  cfg2.spec.unbiased = Model::rules({Rule{{Condition::eq(0, Value::integer(1))}}});
  CHECK_THROWS_WITH_AS(compose_attack(cfg2.spec), doctest::Contains("race"), ValidationError);
}

TEST_CASE("dataset generation") {
  auto cfg = load_compas_like();

  SUBCASE("the same seed reproduces the same dataset") {
    auto a = generate_dataset(cfg.spec, cfg.dataset);
    auto b = generate_dataset(cfg.spec, cfg.dataset);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
      CHECK(instance_to_json(a.points[i]) == instance_to_json(b.points[i]));
    CHECK(a.in_fraction == b.in_fraction);
  }

  SUBCASE("uniform sampling lands near the exact gate measure") {
    double measure = exact_in_measure(cfg.spec);
    CHECK(measure == doctest::Approx(26.0 / 27.0).epsilon(1e-9));
    auto ds = generate_dataset(cfg.spec, cfg.dataset);
    CHECK(std::abs(ds.in_fraction - measure) <= 0.05);
  }

  SUBCASE("a gate that accepts everything yields a fully in-distribution dataset") {
    auto open = cfg.spec;
    open.gate = Model::rules({Rule{{}}});  // an empty conjunction always fires
    DatasetConfig small{3, 100, std::nullopt};
    CHECK(generate_dataset(open, small).in_fraction == 1.0);
  }

  SUBCASE("target fraction steers the mixture") {
    DatasetConfig forced{5, 200, 0.5};
    auto ds = generate_dataset(cfg.spec, forced);
    CHECK(std::abs(ds.in_fraction - 0.5) <= 0.12);
  }
}

TEST_CASE("rank frequencies expose the sensitive feature in-distribution") {
  auto cfg = load_compas_like();
  DatasetConfig small = cfg.dataset;
  small.count = 120;  // the full run belongs to the acceptance suite
  auto ds = generate_dataset(cfg.spec, small);
  REQUIRE(ds.in_fraction >= 0.9);

  for (auto kind : {IndexKind::HollerPackel, IndexKind::DeeganPackel, IndexKind::Responsibility}) {
    auto table = run_experiment(cfg.spec, ds, kind);
    CHECK(table.truncated == 0);
    CHECK(table.duality_spot_failures == 0);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0].feature == "race");
    CHECK(table.rows[0].top1 >= 0.8);
  }
}

TEST_CASE("an entirely out-of-distribution dataset never lets the sensitive feature dominate") {
  // Out of distribution the gate routes every point to the uc-only model, so
  // each uc feature is a singleton flipping set there and belongs to every
  // explanation. The sensitive feature can at best tie them, never lead.
  auto cfg = load_compas_like();
  DatasetConfig all_out{13, 60, 0.0};
  auto ds = generate_dataset(cfg.spec, all_out);
  REQUIRE(ds.in_fraction == 0.0);

  auto composite = compose_attack(cfg.spec);
  for (const auto& point : ds.points) {
    auto p = Problem::make(cfg.spec.space, composite, point);
    auto es = enumerate_explanations(p);
    CHECK_FALSE(std::binary_search(es.cxps.begin(), es.cxps.end(), fs({cfg.spec.sensitive})));
    for (int u : cfg.spec.uncorrelated)
      CHECK(std::binary_search(es.cxps.begin(), es.cxps.end(), fs({u})));
    for (auto kind : {IndexKind::HollerPackel, IndexKind::DeeganPackel, IndexKind::Responsibility}) {
      auto scores = family_scores(kind, es.axps, p.n());
      for (int u : cfg.spec.uncorrelated)
        CHECK(scores[static_cast<std::size_t>(cfg.spec.sensitive)] <=
              scores[static_cast<std::size_t>(u)]);
    }
  }

  auto table = run_experiment(cfg.spec, ds, IndexKind::Responsibility);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[1].top1 == 1.0);  // uc1 ranks first everywhere
  CHECK(table.rows[2].top1 == 1.0);
}

TEST_CASE("a sensitive singleton flipping set dominates every index") {
  auto cfg = load_compas_like();
  DatasetConfig small = cfg.dataset;
  small.count = 40;
  auto ds = generate_dataset(cfg.spec, small);
  auto composite = compose_attack(cfg.spec);

  for (const auto& point : ds.points) {
    auto p = Problem::make(cfg.spec.space, composite, point);
    auto es = enumerate_explanations(p);
    REQUIRE(es.complete);
    bool singleton_cxp = std::binary_search(es.cxps.begin(), es.cxps.end(), fs({cfg.spec.sensitive}));
    if (!singleton_cxp) continue;

    for (const auto& a : es.axps) CHECK(a.contains(cfg.spec.sensitive));
    auto hp = family_scores(IndexKind::HollerPackel, es.axps, p.n());
    CHECK(hp[static_cast<std::size_t>(cfg.spec.sensitive)] ==
          Rational(static_cast<std::int64_t>(es.axps.size())));
    for (auto kind : {IndexKind::HollerPackel, IndexKind::DeeganPackel, IndexKind::Responsibility}) {
      auto scores = family_scores(kind, es.axps, p.n());
      for (const auto& s : scores)
        CHECK(s <= scores[static_cast<std::size_t>(cfg.spec.sensitive)]);
    }
  }
}

TEST_CASE("experiment results are deterministic and worker-count independent") {
  auto cfg = load_compas_like();
  DatasetConfig small = cfg.dataset;
  small.count = 60;
  auto ds = generate_dataset(cfg.spec, small);

  auto one = run_experiment(cfg.spec, ds, IndexKind::DeeganPackel, std::nullopt, 1);
  auto two = run_experiment(cfg.spec, ds, IndexKind::DeeganPackel, std::nullopt, 2);
  CHECK(frequency_table_csv(one) == frequency_table_csv(two));

  auto again = run_experiment(cfg.spec, ds, IndexKind::DeeganPackel, std::nullopt, 1);
  CHECK(frequency_table_csv(one) == frequency_table_csv(again));
}

TEST_CASE("the single-uncorrelated-feature variant behaves the same way") {
  auto cfg = attack_config_from_json(load_json_file(axptest::fixture("german_like.attack.json")));
  CHECK(cfg.spec.space.feature(cfg.spec.sensitive).name == "gender");
  REQUIRE(cfg.spec.uncorrelated.size() == 1);

  DatasetConfig small = cfg.dataset;
  small.count = 100;
  auto ds = generate_dataset(cfg.spec, small);
  REQUIRE(ds.in_fraction >= 0.9);
  auto table = run_experiment(cfg.spec, ds, IndexKind::Responsibility);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].feature == "gender");
  CHECK(table.rows[0].top1 >= 0.8);
  CHECK(table.duality_spot_failures == 0);
}

TEST_CASE("csv layout") {
  FrequencyTable t;
  t.rows = {{"race", "responsibility", 0.9625, 0.037, 0.0}};
  CHECK(frequency_table_csv(t) ==
        "feature,method,first,second,third\nrace,responsibility,0.963,0.037,0.000\n");
}

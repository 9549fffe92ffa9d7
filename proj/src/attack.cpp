#include "axp/attack.hpp"

#include <algorithm>
#include <array>

#include "axp/parallel.hpp"

namespace axp {

namespace {

std::uint64_t space_cardinality(const FeatureSpace& space, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (int i = 0; i < space.size(); ++i) {
    std::uint64_t card = static_cast<std::uint64_t>(space.feature(i).cardinality());
    if (total > cap / card)
      throw OracleCapError("attack space too large for exhaustive verification");
    total *= card;
  }
  return total;
}

bool advance(std::vector<int>& ranks, const FeatureSpace& space) {
  for (int k = 0; k < space.size(); ++k) {
    if (++ranks[static_cast<std::size_t>(k)] < space.feature(k).cardinality()) return true;
    ranks[static_cast<std::size_t>(k)] = 0;
  }
  return false;
}

// Rejects the model if changing any feature in `forbidden` alone can change
// its output somewhere in the space.
void verify_ignores(const FeatureSpace& space, const CompiledModel& m, FeatureSubset forbidden,
                    const std::string& role) {
  space_cardinality(space, oracle_cap());
  std::vector<int> ranks(static_cast<std::size_t>(space.size()), 0);
  do {
    int base = predict_ranks(m, ranks);
    for (int f : forbidden.members()) {
      int orig = ranks[static_cast<std::size_t>(f)];
      for (int r = 0; r < space.feature(f).cardinality(); ++r) {
        if (r == orig) continue;
        ranks[static_cast<std::size_t>(f)] = r;
        if (predict_ranks(m, ranks) != base) {
          std::string what = role + " model reads feature '" + space.feature(f).name +
                             "': flipping it from " +
                             space.feature(f).domain[static_cast<std::size_t>(orig)].str() +
                             " to " + space.feature(f).domain[static_cast<std::size_t>(r)].str() +
                             " changes the output";
          ranks[static_cast<std::size_t>(f)] = orig;
          throw ValidationError(what);
        }
      }
      ranks[static_cast<std::size_t>(f)] = orig;
    }
  } while (advance(ranks, space));
}

}  // namespace

Model compose_attack(const AttackSpec& spec) {
  if (spec.sensitive < 0 || spec.sensitive >= spec.space.size())
    throw ValidationError("sensitive feature index out of range");
  FeatureSubset sensitive_only = FeatureSubset::of({spec.sensitive});

  auto biased = compile(spec.space, spec.biased);
  verify_ignores(spec.space, biased, sensitive_only.complement_in(spec.space.size()), "biased");
  auto unbiased = compile(spec.space, spec.unbiased);
  verify_ignores(spec.space, unbiased, sensitive_only, "unbiased");

  return Model::gated(spec.gate, spec.biased, spec.unbiased);
}

double exact_in_measure(const AttackSpec& spec) {
  auto gate = compile(spec.space, spec.gate);
  std::uint64_t total = space_cardinality(spec.space, oracle_cap());
  std::uint64_t in = 0;
  std::vector<int> ranks(static_cast<std::size_t>(spec.space.size()), 0);
  do {
    if (predict_ranks(gate, ranks) == 1) ++in;
  } while (advance(ranks, spec.space));
  return static_cast<double>(in) / static_cast<double>(total);
}

Dataset generate_dataset(const AttackSpec& spec, const DatasetConfig& cfg) {
  if (cfg.count <= 0) throw ValidationError("dataset count must be positive");
  if (cfg.target_in_fraction && (*cfg.target_in_fraction < 0.0 || *cfg.target_in_fraction > 1.0))
    throw ValidationError("target in-distribution fraction must be in [0,1]");

  auto gate = compile(spec.space, spec.gate);
  SplitMix64 rng(cfg.seed);
  auto draw_uniform = [&](std::vector<int>& ranks) {
    for (int i = 0; i < spec.space.size(); ++i)
      ranks[static_cast<std::size_t>(i)] = static_cast<int>(
          rng.below(static_cast<std::uint64_t>(spec.space.feature(i).cardinality())));
  };

  Dataset out;
  out.points.reserve(static_cast<std::size_t>(cfg.count));
  int in_count = 0;
  std::vector<int> ranks(static_cast<std::size_t>(spec.space.size()), 0);
  for (int k = 0; k < cfg.count; ++k) {
    if (cfg.target_in_fraction) {
      bool want_in = rng.below(1u << 20) < static_cast<std::uint64_t>(*cfg.target_in_fraction * (1u << 20));
      int tries = 0;
      do {
        draw_uniform(ranks);
        if (++tries > 100000)
          throw ValidationError("rejection sampling failed: gate region too skewed for target");
      } while ((predict_ranks(gate, ranks) == 1) != want_in);
    } else {
      draw_uniform(ranks);
    }
    if (predict_ranks(gate, ranks) == 1) ++in_count;
    out.points.push_back(instance_from_ranks(spec.space, ranks));
  }
  out.in_fraction = static_cast<double>(in_count) / static_cast<double>(cfg.count);
  return out;
}

FrequencyTable run_experiment(const AttackSpec& spec, const Dataset& dataset, IndexKind kind,
                              std::optional<int> limit, int workers) {
  Model composite = compose_attack(spec);

  std::vector<int> interest;
  interest.push_back(spec.sensitive);
  for (int u : spec.uncorrelated) interest.push_back(u);

  struct PointOutcome {
    bool truncated = false;
    bool duality_failure = false;
    std::vector<int> ranks;  // dense ranks of the interest features
  };
  std::vector<PointOutcome> outcomes(dataset.points.size());

  parallel_for(static_cast<int>(dataset.points.size()), workers, [&](int idx) {
    auto p = Problem::make(spec.space, composite, dataset.points[static_cast<std::size_t>(idx)]);
    auto es = enumerate_explanations(p, limit);
    auto& out = outcomes[static_cast<std::size_t>(idx)];
    if (!es.complete) {
      out.truncated = true;
      return;
    }
    FeatureSubset sensitive_singleton = FeatureSubset::of({spec.sensitive});
    if (std::binary_search(es.cxps.begin(), es.cxps.end(), sensitive_singleton)) {
      for (const auto& a : es.axps)
        if (!a.contains(spec.sensitive)) out.duality_failure = true;
    }
    auto ranking = dense_rank(family_scores(kind, es.axps, p.n()));
    for (int f : interest) out.ranks.push_back(ranking.rank[static_cast<std::size_t>(f)]);
  });

  FrequencyTable table;
  table.points = static_cast<int>(dataset.points.size());
  std::vector<std::array<int, 3>> counts(interest.size(), {0, 0, 0});
  int included = 0;
  for (const auto& o : outcomes) {
    if (o.truncated) {
      ++table.truncated;
      continue;
    }
    if (o.duality_failure) ++table.duality_spot_failures;
    ++included;
    for (std::size_t k = 0; k < interest.size(); ++k) {
      int r = o.ranks[k];
      if (r >= 1 && r <= 3) ++counts[k][static_cast<std::size_t>(r - 1)];
    }
  }

  for (std::size_t k = 0; k < interest.size(); ++k) {
    FrequencyRow row;
    row.feature = spec.space.feature(interest[k]).name;
    row.method = index_name(kind);
    if (included > 0) {
      row.top1 = static_cast<double>(counts[k][0]) / included;
      row.top2 = static_cast<double>(counts[k][1]) / included;
      row.top3 = static_cast<double>(counts[k][2]) / included;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string frequency_table_csv(const FrequencyTable& table) {
  auto fmt = [](double v) {
    // fixed three decimals, deterministic across platforms
    long long milli = static_cast<long long>(v * 1000.0 + 0.5);
    std::string frac = std::to_string(milli % 1000);
    frac.insert(0, 3 - frac.size(), '0');
    return std::to_string(milli / 1000) + "." + frac;
  };
  std::string out = "feature,method,first,second,third\n";
  for (const auto& r : table.rows)
    out += r.feature + "," + r.method + "," + fmt(r.top1) + "," + fmt(r.top2) + "," + fmt(r.top3) + "\n";
  return out;
}

}  // namespace axp

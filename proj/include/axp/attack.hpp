#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "axp/enumerate.hpp"
#include "axp/indices.hpp"

namespace axp {

/// Deterministic, platform-independent pseudo-random stream (splitmix64).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

/// The two-level composite: a gate routes in-distribution points (gate
/// output 1) to a model that reads only the sensitive feature, and
/// out-of-distribution points to one that ignores it.
struct AttackSpec {
  FeatureSpace space;
  Model gate;
  Model biased;
  Model unbiased;
  int sensitive = 0;
  std::vector<int> uncorrelated;
};

/// Verifies by exhaustive flip tests that `biased` reads only the sensitive
/// feature and `unbiased` never reads it, then assembles the gated model.
/// Violations are refused with the offending flip spelled out.
Model compose_attack(const AttackSpec& spec);

/// Fraction of the whole input space the gate marks in-distribution,
/// computed by exhaustive enumeration.
double exact_in_measure(const AttackSpec& spec);

struct DatasetConfig {
  std::uint64_t seed = 0;
  int count = 0;
  /// When set, each point is drawn in-distribution with this probability
  /// (rejection sampling against the gate); otherwise sampling is uniform
  /// over the whole space.
  std::optional<double> target_in_fraction;
};

struct Dataset {
  std::vector<Instance> points;
  double in_fraction = 0.0;  // achieved, per the gate
};

Dataset generate_dataset(const AttackSpec& spec, const DatasetConfig& cfg);

/// Rank-frequency table for the features of interest: how often each holds
/// dense rank 1, 2, 3 under one index across the dataset.
struct FrequencyRow {
  std::string feature;
  std::string method;
  double top1 = 0, top2 = 0, top3 = 0;
};

struct FrequencyTable {
  std::vector<FrequencyRow> rows;
  int points = 0;
  int truncated = 0;            // enumerations cut off by the limit, excluded
  int duality_spot_failures = 0;  // sensitive singleton flipping set seen but
                                  // sensitive feature missing from some axp
};

FrequencyTable run_experiment(const AttackSpec& spec, const Dataset& dataset, IndexKind kind,
                              std::optional<int> limit = std::nullopt, int workers = 1);

std::string frequency_table_csv(const FrequencyTable& table);

}  // namespace axp

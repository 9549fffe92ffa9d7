#pragma once

#include "axp/attack.hpp"
#include "axp/sufficiency.hpp"

namespace axp {

/// Knobs for the seeded model generator behind fuzz verification.
struct RandomModelOptions {
  int min_features = 2;
  int max_features = 10;
  int max_domain = 3;
  bool allow_trees = true;
  bool allow_gated = true;
};

/// A random (space, model, point) triple, deterministic in the rng stream.
/// Domains are small ascending integer ranges, so every comparator works.
Problem random_problem(SplitMix64& rng, const RandomModelOptions& opt = {});

FeatureSubset random_subset(SplitMix64& rng, int n);

}  // namespace axp

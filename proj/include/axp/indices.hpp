#pragma once

#include <string>
#include <vector>

#include "axp/enumerate.hpp"
#include "axp/rational.hpp"

namespace axp {

enum class IndexKind { HollerPackel, DeeganPackel, Responsibility };
enum class Normalization { Raw, PowerSet, SumToOne };

std::string index_name(IndexKind k);
std::string normalization_name(Normalization n);

struct ScoreVector {
  std::vector<Rational> scores;
  IndexKind kind = IndexKind::HollerPackel;
  Normalization normalization = Normalization::Raw;

  int n() const { return static_cast<int>(scores.size()); }
};

/// Family-level scoring; the family is taken to be the complete collection
/// of minimal sufficient sets. Features in no member score exactly zero.
std::vector<Rational> family_scores(IndexKind kind, const std::vector<FeatureSubset>& family, int n);

/// Raw count of minimal sufficient sets containing each feature.
/// Refuses incomplete enumerations: partial counts are unsound.
ScoreVector holler_packel(const ExplanationSet& es);

/// Sum over containing sets of the reciprocal of their size.
ScoreVector deegan_packel(const ExplanationSet& es);

/// Reciprocal of the size of the smallest containing set; zero if none.
ScoreVector responsibility(const ExplanationSet& es);

ScoreVector score(IndexKind kind, const ExplanationSet& es);

/// Raw -> PowerSet divides by 2^(n-1); Raw -> SumToOne divides by the total
/// (identity on the all-zero vector). Only raw vectors may be normalized.
ScoreVector normalize(const ScoreVector& sv, Normalization mode);

/// Dense tie-sharing ranking: equal scores share a rank, ranks run 1,2,3,...
/// with no gaps. Invariant under positive rescaling of the scores.
struct Ranking {
  std::vector<int> rank;
};

Ranking dense_rank(const ScoreVector& sv);
Ranking dense_rank(const std::vector<Rational>& scores);

}  // namespace axp

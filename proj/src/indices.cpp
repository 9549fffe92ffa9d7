#include "axp/indices.hpp"

#include <algorithm>

namespace axp {

std::string index_name(IndexKind k) {
  switch (k) {
    case IndexKind::HollerPackel: return "holler_packel";
    case IndexKind::DeeganPackel: return "deegan_packel";
    case IndexKind::Responsibility: return "responsibility";
  }
  return "?";
}

std::string normalization_name(Normalization n) {
  switch (n) {
    case Normalization::Raw: return "raw";
    case Normalization::PowerSet: return "powerset";
    case Normalization::SumToOne: return "sum";
  }
  return "?";
}

std::vector<Rational> family_scores(IndexKind kind, const std::vector<FeatureSubset>& family, int n) {
  std::vector<Rational> scores(static_cast<std::size_t>(n), Rational(0));
  for (const auto& s : family) {
    int size = s.count();
    if (size == 0) continue;  // the empty set contains no feature
    for (int i : s.members()) {
      auto& cur = scores[static_cast<std::size_t>(i)];
      switch (kind) {
        case IndexKind::HollerPackel:
          cur += Rational(1);
          break;
        case IndexKind::DeeganPackel:
          cur += Rational(1, size);
          break;
        case IndexKind::Responsibility:
          cur = std::max(cur, Rational(1, size));
          break;
      }
    }
  }
  return scores;
}

namespace {
ScoreVector score_complete(IndexKind kind, const ExplanationSet& es) {
  if (!es.complete)
    throw ContractError("scores from a partial explanation set are unsound; "
                        "rerun enumeration without a limit");
  return ScoreVector{family_scores(kind, es.axps, es.n), kind, Normalization::Raw};
}
}  // namespace

ScoreVector holler_packel(const ExplanationSet& es) { return score_complete(IndexKind::HollerPackel, es); }
ScoreVector deegan_packel(const ExplanationSet& es) { return score_complete(IndexKind::DeeganPackel, es); }
ScoreVector responsibility(const ExplanationSet& es) { return score_complete(IndexKind::Responsibility, es); }

ScoreVector score(IndexKind kind, const ExplanationSet& es) { return score_complete(kind, es); }

ScoreVector normalize(const ScoreVector& sv, Normalization mode) {
  if (sv.normalization != Normalization::Raw)
    throw ContractError("normalize expects a raw score vector");
  ScoreVector out = sv;
  out.normalization = mode;
  switch (mode) {
    case Normalization::Raw:
      break;
    case Normalization::PowerSet: {
      if (sv.n() == 0) break;
      Rational denom(std::int64_t{1} << (sv.n() - 1));
      for (auto& s : out.scores) s = s / denom;
      break;
    }
    case Normalization::SumToOne: {
      Rational total(0);
      for (const auto& s : sv.scores) total += s;
      if (!total.is_zero())
        for (auto& s : out.scores) s = s / total;
      break;
    }
  }
  return out;
}

Ranking dense_rank(const std::vector<Rational>& scores) {
  std::vector<Rational> distinct = scores;
  std::sort(distinct.begin(), distinct.end(), [](const Rational& a, const Rational& b) { return b < a; });
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  Ranking r;
  r.rank.reserve(scores.size());
  for (const auto& s : scores) {
    auto it = std::find(distinct.begin(), distinct.end(), s);
    r.rank.push_back(static_cast<int>(it - distinct.begin()) + 1);
  }
  return r;
}

Ranking dense_rank(const ScoreVector& sv) { return dense_rank(sv.scores); }

}  // namespace axp

#include "axp/enumerate.hpp"

#include <algorithm>
#include <string>

namespace axp {

void sort_family(std::vector<FeatureSubset>& family) { std::sort(family.begin(), family.end()); }

FeatureSubset shrink(const Problem& p, FeatureSubset seed) {
  if (!is_sufficient(p, seed)) throw ContractError("shrink: seed is not sufficient");
  FeatureSubset s = seed;
  for (int i : seed.members()) {
    FeatureSubset t = s.without(i);
    if (is_sufficient(p, t)) s = t;
  }
  return s;
}

FeatureSubset grow(const Problem& p, FeatureSubset seed) {
  if (is_sufficient(p, seed)) throw ContractError("grow: seed is already sufficient");
  FeatureSubset q = seed;
  for (int i = 0; i < p.n(); ++i) {
    if (q.contains(i)) continue;
    FeatureSubset t = q.with(i);
    if (!is_sufficient(p, t)) q = t;
  }
  return q;
}

MapSolver::MapSolver(int n) : n_(n) {}

void MapSolver::block_supersets(FeatureSubset axp) {
  clauses_.push_back(Clause{axp.members(), /*positive=*/false});
}

void MapSolver::require_hit(FeatureSubset cxp) {
  clauses_.push_back(Clause{cxp.members(), /*positive=*/true});
}

bool MapSolver::dpll(std::vector<signed char>& assign, bool prefer_true) const {
  // unit propagation
  for (;;) {
    bool changed = false;
    for (const auto& cl : clauses_) {
      int unassigned = -1;
      int free_count = 0;
      bool satisfied = false;
      for (int v : cl.vars) {
        signed char a = assign[static_cast<std::size_t>(v)];
        if (a < 0) {
          ++free_count;
          unassigned = v;
        } else if ((a == 1) == cl.positive) {
          satisfied = true;
          break;
        }
      }
      if (satisfied) continue;
      if (free_count == 0) return false;
      if (free_count == 1) {
        assign[static_cast<std::size_t>(unassigned)] = cl.positive ? 1 : 0;
        changed = true;
      }
    }
    if (!changed) break;
  }

  int var = -1;
  for (int i = 0; i < n_; ++i)
    if (assign[static_cast<std::size_t>(i)] < 0) { var = i; break; }
  if (var < 0) return true;

  for (int attempt = 0; attempt < 2; ++attempt) {
    bool value = (attempt == 0) == prefer_true;
    std::vector<signed char> saved = assign;
    assign[static_cast<std::size_t>(var)] = value ? 1 : 0;
    if (dpll(assign, prefer_true)) return true;
    assign = saved;
  }
  return false;
}

std::optional<FeatureSubset> MapSolver::next_seed(Bias bias) {
  ++solve_calls_;
  std::vector<signed char> assign(static_cast<std::size_t>(n_), -1);
  bool prefer_true = (bias == Bias::Maximal);
  if (!dpll(assign, prefer_true)) return std::nullopt;

  // push the model to a subset-maximal (or -minimal) one; a single
  // ascending pass suffices because flips only move in one direction
  auto satisfied_everywhere = [&]() {
    for (const auto& cl : clauses_) {
      bool sat = false;
      for (int v : cl.vars)
        if ((assign[static_cast<std::size_t>(v)] == 1) == cl.positive) { sat = true; break; }
      if (!sat) return false;
    }
    return true;
  };
  for (int i = 0; i < n_; ++i) {
    signed char want = prefer_true ? 1 : 0;
    if (assign[static_cast<std::size_t>(i)] == want) continue;
    signed char saved = assign[static_cast<std::size_t>(i)];
    assign[static_cast<std::size_t>(i)] = want;
    if (!satisfied_everywhere()) assign[static_cast<std::size_t>(i)] = saved;
  }

  FeatureSubset seed;
  for (int i = 0; i < n_; ++i)
    if (assign[static_cast<std::size_t>(i)] == 1) seed = seed.with(i);
  return seed;
}

ExplanationSet enumerate_explanations(const Problem& p, std::optional<int> limit,
                                      MapSolver::Bias bias, EnumerationStats* stats) {
  ExplanationSet es;
  es.n = p.n();
  MapSolver map(p.n());
  int reports = 0;
  bool truncated = false;

  while (auto seed = map.next_seed(bias)) {
    if (limit && reports >= *limit) {
      truncated = true;
      break;
    }
    if (is_sufficient(p, *seed)) {
      FeatureSubset axp = shrink(p, *seed);
      es.axps.push_back(axp);
      map.block_supersets(axp);
    } else {
      FeatureSubset q = grow(p, *seed);
      es.cxps.push_back(q.complement_in(p.n()));
      map.require_hit(q.complement_in(p.n()));
    }
    ++reports;
  }

  es.complete = !truncated;
  sort_family(es.axps);
  sort_family(es.cxps);
  if (stats) {
    stats->iterations = reports;
    stats->map_solver_calls = map.solve_calls();
  }
  return es;
}

ExplanationSet enumerate_bruteforce(const Problem& p, int lattice_cap, std::uint64_t point_cap) {
  int n = p.n();
  if (n > lattice_cap)
    throw OracleCapError("lattice enumeration cap exceeded: n=" + std::to_string(n) + " > " +
                         std::to_string(lattice_cap));
  std::uint64_t points = 1;
  for (int i = 0; i < n; ++i) {
    std::uint64_t card = static_cast<std::uint64_t>(p.space.feature(i).cardinality());
    if (points > point_cap / card)
      throw OracleCapError("lattice enumeration cap exceeded: point count over " +
                           std::to_string(point_cap));
    points *= card;
  }

  // truth table over mixed-radix point indices
  std::vector<std::uint64_t> stride(static_cast<std::size_t>(n), 1);
  for (int i = 1; i < n; ++i)
    stride[static_cast<std::size_t>(i)] =
        stride[static_cast<std::size_t>(i - 1)] *
        static_cast<std::uint64_t>(p.space.feature(i - 1).cardinality());
  std::vector<std::uint8_t> table(points);
  {
    std::vector<int> ranks(static_cast<std::size_t>(n), 0);
    for (std::uint64_t idx = 0;; ++idx) {
      table[idx] = static_cast<std::uint8_t>(predict_ranks(p.compiled, ranks));
      int k = 0;
      for (; k < n; ++k) {
        if (++ranks[static_cast<std::size_t>(k)] < p.space.feature(k).cardinality()) break;
        ranks[static_cast<std::size_t>(k)] = 0;
      }
      if (k == n) break;
    }
  }

  const std::uint8_t base = static_cast<std::uint8_t>(p.prediction);
  const std::uint64_t subsets = std::uint64_t{1} << n;
  std::vector<std::uint8_t> sufficient(subsets, 1);
  for (std::uint64_t s = 0; s < subsets; ++s) {
    std::vector<int> free_feats;
    std::uint64_t idx = 0;
    for (int i = 0; i < n; ++i) {
      if ((s >> i) & 1u)
        idx += stride[static_cast<std::size_t>(i)] *
               static_cast<std::uint64_t>(p.ranks[static_cast<std::size_t>(i)]);
      else
        free_feats.push_back(i);
    }
    std::vector<int> ranks(static_cast<std::size_t>(n), 0);
    bool ok = true;
    for (;;) {
      if (table[idx] != base) { ok = false; break; }
      std::size_t k = 0;
      for (; k < free_feats.size(); ++k) {
        int f = free_feats[k];
        std::uint64_t st = stride[static_cast<std::size_t>(f)];
        if (++ranks[static_cast<std::size_t>(f)] < p.space.feature(f).cardinality()) {
          idx += st;
          break;
        }
        idx -= st * static_cast<std::uint64_t>(ranks[static_cast<std::size_t>(f)] - 1);
        ranks[static_cast<std::size_t>(f)] = 0;
      }
      if (k == free_feats.size()) break;
    }
    sufficient[s] = ok ? 1 : 0;
  }

  ExplanationSet es;
  es.n = n;
  es.complete = true;
  const std::uint64_t full = subsets - 1;
  for (std::uint64_t s = 0; s < subsets; ++s) {
    if (sufficient[s]) {
      bool minimal = true;
      for (int i = 0; i < n && minimal; ++i)
        if (((s >> i) & 1u) && sufficient[s & ~(std::uint64_t{1} << i)]) minimal = false;
      if (minimal) es.axps.push_back(FeatureSubset(s));
    }
    std::uint64_t comp = full & ~s;  // candidate flipping set is the complement
    if (!sufficient[s]) {
      bool minimal = true;
      for (int i = 0; i < n && minimal; ++i)
        if (((comp >> i) & 1u) && !sufficient[s | (std::uint64_t{1} << i)]) minimal = false;
      if (minimal) es.cxps.push_back(FeatureSubset(comp));
    }
  }
  sort_family(es.axps);
  sort_family(es.cxps);
  return es;
}

std::vector<FeatureSubset> minimal_hitting_sets(const std::vector<FeatureSubset>& family, int n) {
  if (n > 20) throw OracleCapError("minimal hitting set scan capped at n=20");
  auto hits_all = [&](FeatureSubset s) {
    for (const auto& f : family)
      if (!s.intersects(f)) return false;
    return true;
  };
  std::vector<FeatureSubset> out;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t bits = 0; bits < subsets; ++bits) {
    FeatureSubset s(bits);
    if (!hits_all(s)) continue;
    bool minimal = true;
    for (int i = 0; i < n && minimal; ++i)
      if (s.contains(i) && hits_all(s.without(i))) minimal = false;
    if (minimal) out.push_back(s);
  }
  sort_family(out);
  return out;
}

bool check_duality(const ExplanationSet& es) {
  if (!es.complete) throw ContractError("check_duality: explanation set is not complete");
  return minimal_hitting_sets(es.cxps, es.n) == es.axps &&
         minimal_hitting_sets(es.axps, es.n) == es.cxps;
}

}  // namespace axp

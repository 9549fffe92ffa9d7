#pragma once

#include <optional>
#include <vector>

#include "axp/sufficiency.hpp"

namespace axp {

/// The complete explanation picture at one point: the minimal sufficient
/// subsets (axps) and the minimal prediction-flipping subsets (cxps).
/// When `complete` is true the two families are minimal-hitting-set duals.
/// Both lists are kept sorted (subsets ascending, lists lexicographic).
struct ExplanationSet {
  std::vector<FeatureSubset> axps;
  std::vector<FeatureSubset> cxps;
  int n = 0;
  bool complete = false;
};

/// Deletion-based minimization: drops members in ascending index order,
/// keeping every drop that preserves sufficiency. Requires a sufficient seed.
FeatureSubset shrink(const Problem& p, FeatureSubset seed);

/// Dual expansion: adds features in ascending index order, keeping every
/// addition that preserves insufficiency. Requires an insufficient seed.
/// The complement of the result is a minimal flipping set.
FeatureSubset grow(const Problem& p, FeatureSubset seed);

/// Backtracking search with unit propagation over one boolean selector per
/// feature. Negative clauses block supersets of reported minimal sufficient
/// sets; positive clauses force future seeds to hit reported flipping sets.
class MapSolver {
 public:
  explicit MapSolver(int n);

  void block_supersets(FeatureSubset axp);
  void require_hit(FeatureSubset cxp);

  enum class Bias { Maximal, Minimal };

  /// A subset-maximal (or -minimal, per bias) model of the clause set,
  /// or nullopt once the map is exhausted.
  std::optional<FeatureSubset> next_seed(Bias bias = Bias::Maximal);

  int solve_calls() const { return solve_calls_; }

 private:
  struct Clause {
    std::vector<int> vars;
    bool positive;  // all literals share a polarity by construction
  };
  bool dpll(std::vector<signed char>& assign, bool prefer_true) const;

  int n_;
  std::vector<Clause> clauses_;
  int solve_calls_ = 0;
};

struct EnumerationStats {
  int iterations = 0;
  int map_solver_calls = 0;
};

/// MARCO-style loop: pull an unexplored seed from the map, classify it with
/// the sufficiency oracle, minimize (shrink) or maximize (grow), report, and
/// block. Terminates with complete=true when the map is exhausted, or
/// complete=false if `limit` reports were reached first.
ExplanationSet enumerate_explanations(const Problem& p, std::optional<int> limit = std::nullopt,
                                      MapSolver::Bias bias = MapSolver::Bias::Maximal,
                                      EnumerationStats* stats = nullptr);

/// Independent oracle: classifies every subset of the lattice by quantifying
/// over completions of a precomputed truth table, then extracts the minimal
/// sufficient sets and the minimal flipping sets directly.
ExplanationSet enumerate_bruteforce(const Problem& p, int lattice_cap = 16,
                                    std::uint64_t point_cap = oracle_cap());

/// All minimal hitting sets of the family, by explicit lattice scan
/// (n <= 20). The empty family yields {{}}; a family containing the empty
/// set has no hitting sets.
std::vector<FeatureSubset> minimal_hitting_sets(const std::vector<FeatureSubset>& family, int n);

/// Verifies the duality on a complete set: axps are exactly the minimal
/// hitting sets of cxps, and conversely.
bool check_duality(const ExplanationSet& es);

/// Canonical ordering used everywhere a family is serialized or compared.
void sort_family(std::vector<FeatureSubset>& family);

}  // namespace axp

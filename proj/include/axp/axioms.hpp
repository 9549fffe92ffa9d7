#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "axp/indices.hpp"

namespace axp {

/// A family of feature subsets, canonically sorted. Families produced by
/// the universe generator are antichains: exactly the shapes a complete
/// collection of minimal sufficient sets can take.
using Family = std::vector<FeatureSubset>;

/// The members of the family containing feature i.
Family family_members_with(const Family& family, int i);

/// A named scoring function over explanation families. The three built-in
/// indices are available, and arbitrary candidates may be registered for
/// the axiom checks and the uniqueness comparison.
struct Aggregator {
  std::string name;
  std::function<std::vector<Rational>(const Family&, int)> fn;
};

Aggregator builtin_aggregator(IndexKind kind);

/// A partial order on families used to parameterize the monotonicity axiom.
/// compare returns -1/0/+1 for strictly-less/equal/strictly-greater keys,
/// or nullopt when the keys are incomparable.
struct RankingFunction {
  std::string name;
  std::function<std::optional<int>(const Family&, const Family&)> compare;
};

/// Keys are the families themselves, ordered by inclusion.
RankingFunction subset_order();
/// Key is minus the size of the smallest member; the empty family is lowest.
RankingFunction neg_min_size();

/// The required total of an efficient aggregator's scores.
struct EfficiencyTarget {
  std::string name;
  std::function<Rational(const Family&, int)> value;
};

EfficiencyTarget sum_memberships_target();  // sum over features of |M_i|
EfficiencyTarget count_axps_target();       // |M|
EfficiencyTarget constant_one_target();     // 1

struct Counterexample {
  Family left;
  Family right;
  int n = 0;
  int feature = -1;
  Rational left_value;
  Rational right_value;
  std::string relation;  // the constraint that failed, human-readable
};

struct AxiomReport {
  std::string axiom;
  std::string aggregator;
  bool satisfied = true;
  std::optional<Counterexample> counterexample;
  std::function<bool()> replay;  // re-evaluates the counterexample; true = still violated

  static AxiomReport pass(std::string axiom, std::string agg);
};

/// Streams every antichain of nonempty subsets of {0..n-1} (including the
/// empty family) with at most max_family_size members, in a fixed order.
/// These are precisely the realizable explanation families.
std::vector<Family> antichain_universe(int n, int max_family_size = 1 << 20);

/// Builds a rule set over n binary features whose complete family of minimal
/// sufficient sets at the all-ones point is exactly the given antichain
/// (one rule per member). The empty family realizes as the constant model,
/// whose sole minimal sufficient set is the empty set.
Problem realize_family(const Family& family, int n);

/// Monotonicity with respect to alpha: comparable keys order the scores the
/// same way (strictly for strictly ordered keys), and identical per-feature
/// families force identical scores.
AxiomReport check_monotonicity(const Aggregator& agg, const RankingFunction& alpha,
                               const std::vector<Family>& universe, int n);

/// Family-level symmetry: relabeling features relabels scores, for every
/// permutation of {0..n-1}.
AxiomReport check_symmetry(const Aggregator& agg, const std::vector<Family>& universe, int n);

/// End-to-end symmetry through the real pipeline: permute the model and
/// point, re-enumerate, and compare score vectors under the permutation.
AxiomReport check_symmetry_pipeline(const Aggregator& agg, const Problem& p, const Permutation& pi);

AxiomReport check_null_feature(const Aggregator& agg, const std::vector<Family>& universe, int n);

AxiomReport check_efficiency(const Aggregator& agg, const EfficiencyTarget& target,
                             const std::vector<Family>& universe, int n);

AxiomReport check_unit_efficiency(const Aggregator& agg, const std::vector<Family>& universe, int n);

/// End-to-end contraction through the real pipeline: merge T, re-enumerate,
/// and require score([T]) <= sum of the members' scores, with equality when
/// T is itself a minimal sufficient set of least size for all its members.
/// T must not contain a feature absent from every explanation.
AxiomReport check_contraction(const Aggregator& agg, const Problem& p, FeatureSubset t);

/// Contraction quantified over realized universe families and all valid T.
AxiomReport check_contraction_universe(const Aggregator& agg, const std::vector<Family>& universe,
                                       int n);

/// The full aggregator x axiom matrix on one universe.
struct AxiomMatrix {
  std::vector<std::string> axioms;
  std::map<std::string, std::map<std::string, AxiomReport>> by_aggregator;
};

AxiomMatrix run_axiom_matrix(const std::vector<Aggregator>& aggs, int universe_n,
                             int max_family_size = 1 << 20);

/// Reconstructs the forced-score derivation showing that Minimal
/// Monotonicity + Symmetry + Null Feature + C-Efficiency pins all four
/// scores on the family {{0,1},{2,3}}, then compares the forced sum with
/// the efficiency target. For the constant-1 target the sum is forced to 2,
/// a contradiction; the totals used by the built-in indices stay consistent.
struct ImpossibilityTranscript {
  std::vector<std::string> steps;
  std::map<int, Rational> forced;  // feature -> forced score on {{0,1},{2,3}}
  Rational forced_sum;
  Rational required;
  bool contradiction = false;
  std::string final_line;
};

ImpossibilityTranscript demonstrate_impossibility(const EfficiencyTarget& target = constant_one_target());

/// Characterization probe: does the candidate pass the named
/// axiom bundle on the universe, and if so does it agree pointwise with
/// the corresponding built-in index?
struct UniquenessResult {
  std::string aggregator;
  bool passes_all = false;
  std::string failed_axiom;       // first failing axiom when !passes_all
  bool agrees_with_builtin = false;
  std::string builtin;
};

UniquenessResult uniqueness_check(const Aggregator& candidate, IndexKind builtin, int universe_n);

}  // namespace axp

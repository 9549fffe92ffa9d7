#pragma once

#include <initializer_list>
#include <string>

#include "axp/axioms.hpp"
#include "axp/json_io.hpp"
#include "axp/random_models.hpp"

namespace axptest {

inline std::string fixture(const std::string& name) {
  return std::string(AXP_FIXTURE_DIR) + "/" + name;
}

inline axp::Problem load_problem(const std::string& model_file, const std::string& instance_file) {
  auto [space, model] = axp::problem_file_from_json(axp::load_json_file(fixture(model_file)));
  auto instance = axp::instance_from_json(axp::load_json_file(fixture(instance_file)));
  return axp::Problem::make(std::move(space), std::move(model), std::move(instance));
}

inline axp::FeatureSubset fs(std::initializer_list<int> members) {
  return axp::FeatureSubset::of(members);
}

inline axp::Family fam(std::initializer_list<std::initializer_list<int>> subsets) {
  axp::Family out;
  for (const auto& s : subsets) out.push_back(axp::FeatureSubset::of(s));
  axp::sort_family(out);
  return out;
}

/// Binary space over n features with the all-ones point and one rule per
/// subset; its minimal sufficient sets are exactly the given family.
inline axp::Problem realized(std::initializer_list<std::initializer_list<int>> subsets, int n) {
  return axp::realize_family(fam(subsets), n);
}

}  // namespace axptest

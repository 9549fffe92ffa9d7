#include "axp/domain.hpp"

#include <set>
#include <utility>

namespace axp {

FeatureSpace::FeatureSpace(std::vector<FeatureDef> features) : features_(std::move(features)) {
  if (features_.size() > 62)
    throw ValidationError("feature space too large (max 62 features)");
  std::set<std::string> names;
  for (const auto& f : features_) {
    if (f.name.empty()) throw ValidationError("feature with empty name");
    if (!names.insert(f.name).second)
      throw ValidationError("duplicate feature name '" + f.name + "'");
    if (f.domain.empty())
      throw ValidationError("feature '" + f.name + "' has an empty domain");
    if (f.domain.size() > 62)
      throw ValidationError("feature '" + f.name + "' domain too large (max 62 values)");
    for (std::size_t i = 0; i < f.domain.size(); ++i)
      for (std::size_t j = i + 1; j < f.domain.size(); ++j)
        if (f.domain[i] == f.domain[j])
          throw ValidationError("feature '" + f.name + "' has duplicate domain value " +
                                f.domain[i].str());
  }
}

const FeatureDef& FeatureSpace::feature(int i) const {
  if (i < 0 || i >= size()) throw ValidationError("feature index " + std::to_string(i) + " out of range");
  return features_[static_cast<std::size_t>(i)];
}

std::optional<int> FeatureSpace::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (features_[static_cast<std::size_t>(i)].name == name) return i;
  return std::nullopt;
}

std::vector<int> ranks_of(const FeatureSpace& space, const Instance& x) {
  if (static_cast<int>(x.values.size()) != space.size())
    throw ValidationError("instance has " + std::to_string(x.values.size()) + " values, expected " +
                          std::to_string(space.size()));
  std::vector<int> ranks(x.values.size());
  for (int i = 0; i < space.size(); ++i) {
    auto r = space.feature(i).rank_of(x.values[static_cast<std::size_t>(i)]);
    if (!r)
      throw ValidationError("value " + x.values[static_cast<std::size_t>(i)].str() +
                            " is not in the domain of feature '" + space.feature(i).name + "'");
    ranks[static_cast<std::size_t>(i)] = *r;
  }
  return ranks;
}

Instance instance_from_ranks(const FeatureSpace& space, const std::vector<int>& ranks) {
  if (static_cast<int>(ranks.size()) != space.size())
    throw ValidationError("rank vector length mismatch");
  Instance x;
  x.values.reserve(ranks.size());
  for (int i = 0; i < space.size(); ++i) {
    int r = ranks[static_cast<std::size_t>(i)];
    if (r < 0 || r >= space.feature(i).cardinality())
      throw ValidationError("rank out of range for feature '" + space.feature(i).name + "'");
    x.values.push_back(space.feature(i).domain[static_cast<std::size_t>(r)]);
  }
  return x;
}

}  // namespace axp

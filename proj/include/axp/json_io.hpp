#pragma once

#include <string>
#include <utility>

#include <json.hpp>

#include "axp/attack.hpp"
#include "axp/enumerate.hpp"
#include "axp/indices.hpp"
#include "axp/model.hpp"

namespace axp {

using Json = nlohmann::json;

// Values: integers stay JSON numbers, symbols stay JSON strings.
Json value_to_json(const Value& v);
Value value_from_json(const Json& j, const std::string& where);

Json space_to_json(const FeatureSpace& space);
FeatureSpace space_from_json(const Json& j);

Json model_to_json(const Model& m);
Model model_from_json(const Json& j, const std::string& where = "model");

Json instance_to_json(const Instance& x);
Instance instance_from_json(const Json& j);

/// {"features": [...], "model": {...}}
Json problem_file_to_json(const FeatureSpace& space, const Model& m);
std::pair<FeatureSpace, Model> problem_file_from_json(const Json& j);

/// {"axps": [[indices]...], "complete": bool, "cxps": [[indices]...]},
/// subsets ascending, lists lexicographic.
Json explanation_set_to_json(const ExplanationSet& es);
ExplanationSet explanation_set_from_json(const Json& j);

/// {feature_name: value}, values rounded to three decimals.
Json score_vector_to_json(const FeatureSpace& space, const ScoreVector& sv);
Json ranking_to_json(const FeatureSpace& space, const Ranking& r);

struct AttackConfig {
  AttackSpec spec;
  DatasetConfig dataset;
};

Json attack_config_to_json(const AttackConfig& cfg);
AttackConfig attack_config_from_json(const Json& j);

/// Reads and parses a JSON file; parse and schema errors carry the path.
Json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Two-space indent, sorted keys, trailing newline. All emitted files and
/// golden fixtures use this form.
std::string canonical_dump(const Json& j);

}  // namespace axp

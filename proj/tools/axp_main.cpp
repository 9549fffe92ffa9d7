#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "axp/axioms.hpp"
#include "axp/json_io.hpp"
#include "axp/random_models.hpp"

namespace {

using axp::Json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitOracleCap = 3;
constexpr int kExitTruncated = 4;

struct CommonFlags {
  std::string out;
  std::string format;
};

void emit(const CommonFlags& flags, const std::string& content, const Json& manifest) {
  if (flags.out.empty()) {
    std::cout << content;
    return;
  }
  axp::write_text_file(flags.out, content);
  axp::write_text_file(flags.out + ".manifest.json", axp::canonical_dump(manifest));
}

Json base_manifest(const std::string& command, const CommonFlags& flags) {
  Json m{{"command", command},
         {"enumeration_limit", 0},
         {"format", flags.format},
         {"index", "all"},
         {"input_paths", Json::object()},
         {"normalization", "raw"},
         {"oracle_mode", "structural"},
         {"output_paths", Json::object()},
         {"seed", 0}};
  if (!flags.out.empty()) m["output_paths"]["result"] = flags.out;
  return m;
}

std::vector<axp::IndexKind> parse_indices(const std::string& index) {
  if (index == "all")
    return {axp::IndexKind::HollerPackel, axp::IndexKind::DeeganPackel, axp::IndexKind::Responsibility};
  if (index == "hp") return {axp::IndexKind::HollerPackel};
  if (index == "dp") return {axp::IndexKind::DeeganPackel};
  if (index == "resp") return {axp::IndexKind::Responsibility};
  throw axp::ValidationError("unknown index '" + index + "' (expected hp|dp|resp|all)");
}

axp::Normalization parse_normalization(const std::string& mode) {
  if (mode == "raw") return axp::Normalization::Raw;
  if (mode == "powerset") return axp::Normalization::PowerSet;
  if (mode == "sum") return axp::Normalization::SumToOne;
  throw axp::ValidationError("unknown normalization '" + mode + "' (expected raw|powerset|sum)");
}

int cmd_explain(const std::string& model_path, const std::string& instance_path,
                const std::string& index, const std::string& normalization,
                const std::string& oracle, int limit, CommonFlags flags) {
  auto [space, model] = axp::problem_file_from_json(axp::load_json_file(model_path));
  auto instance = axp::instance_from_json(axp::load_json_file(instance_path));
  auto problem = axp::Problem::make(space, model, instance);

  std::optional<int> lim;
  if (limit > 0) lim = limit;

  axp::ExplanationSet es;
  if (oracle == "structural") {
    es = axp::enumerate_explanations(problem, lim);
  } else if (oracle == "brute") {
    es = axp::enumerate_bruteforce(problem);
  } else if (oracle == "cross") {
    es = axp::enumerate_explanations(problem, lim);
    if (es.complete) {
      auto brute = axp::enumerate_bruteforce(problem);
      if (es.axps != brute.axps || es.cxps != brute.cxps)
        throw axp::ValidationError("oracle cross-check failed: enumerations disagree");
    }
  } else {
    throw axp::ValidationError("unknown oracle mode '" + oracle + "' (expected structural|brute|cross)");
  }

  auto norm = parse_normalization(normalization);
  Json manifest = base_manifest("explain", flags);
  manifest["input_paths"] = Json{{"instance", instance_path}, {"model", model_path}};
  manifest["index"] = index;
  manifest["normalization"] = normalization;
  manifest["oracle_mode"] = oracle;
  manifest["enumeration_limit"] = limit;

  if (flags.format == "csv") {
    if (!es.complete) throw axp::ValidationError("csv scores need a complete enumeration");
    std::string csv = "feature,index,score,rank\n";
    for (auto kind : parse_indices(index)) {
      auto raw = axp::score(kind, es);
      auto sv = norm == axp::Normalization::Raw ? raw : axp::normalize(raw, norm);
      auto ranking = axp::dense_rank(raw);
      for (int i = 0; i < problem.n(); ++i)
        csv += problem.space.feature(i).name + "," + axp::index_name(kind) + "," +
               axp::format3(sv.scores[static_cast<std::size_t>(i)]) + "," +
               std::to_string(ranking.rank[static_cast<std::size_t>(i)]) + "\n";
    }
    emit(flags, csv, manifest);
    return kExitOk;
  }

  Json out = axp::explanation_set_to_json(es);
  out["prediction"] = problem.prediction;
  if (es.complete) {
    Json scores = Json::object();
    Json rankings = Json::object();
    for (auto kind : parse_indices(index)) {
      auto raw = axp::score(kind, es);
      auto sv = norm == axp::Normalization::Raw ? raw : axp::normalize(raw, norm);
      scores[axp::index_name(kind)] = axp::score_vector_to_json(problem.space, sv);
      rankings[axp::index_name(kind)] = axp::ranking_to_json(problem.space, axp::dense_rank(raw));
    }
    out["scores"] = scores;
    out["rankings"] = rankings;
  }
  emit(flags, axp::canonical_dump(out), manifest);
  return es.complete ? kExitOk : kExitTruncated;
}

axp::Aggregator named_control(const std::string& name) {
  using axp::Family;
  using axp::Rational;
  if (name == "constant-one")
    return {"constant-one", [](const Family&, int n) {
              return std::vector<Rational>(static_cast<std::size_t>(n), Rational(1));
            }};
  if (name == "position-biased")
    return {"position-biased", [](const Family& f, int n) {
              auto s = axp::family_scores(axp::IndexKind::HollerPackel, f, n);
              for (int i = 0; i < n; ++i)
                s[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i)] * Rational(i);
              return s;
            }};
  if (name == "half-holler-packel")
    return {"half-holler-packel", [](const Family& f, int n) {
              auto s = axp::family_scores(axp::IndexKind::HollerPackel, f, n);
              for (auto& v : s) v = v * Rational(1, 2);
              return s;
            }};
  if (name == "squared-deegan-packel")
    return {"squared-deegan-packel", [](const Family& f, int n) {
              std::vector<Rational> s(static_cast<std::size_t>(n), Rational(0));
              for (const auto& sub : f)
                for (int i : sub.members())
                  s[static_cast<std::size_t>(i)] +=
                      Rational(1, static_cast<std::int64_t>(sub.count()) * sub.count());
              return s;
            }};
  throw axp::ValidationError("unknown aggregator '" + name +
                             "' (expected constant-one|position-biased|half-holler-packel|"
                             "squared-deegan-packel)");
}

Json report_to_json(const axp::AxiomReport& r) {
  Json j{{"aggregator", r.aggregator}, {"axiom", r.axiom}, {"satisfied", r.satisfied}};
  if (r.counterexample) {
    const auto& ce = *r.counterexample;
    auto family_json = [](const axp::Family& f) {
      Json out = Json::array();
      for (const auto& s : f) {
        Json members = Json::array();
        for (int i : s.members()) members.push_back(i);
        out.push_back(members);
      }
      return out;
    };
    j["counterexample"] = Json{{"feature", ce.feature},
                               {"left", family_json(ce.left)},
                               {"left_value", ce.left_value.str()},
                               {"relation", ce.relation},
                               {"right", family_json(ce.right)},
                               {"right_value", ce.right_value.str()}};
  }
  return j;
}

Json transcript_to_json(const axp::ImpossibilityTranscript& t) {
  Json forced = Json::object();
  for (const auto& [i, v] : t.forced) forced[std::to_string(i)] = v.str();
  Json steps = Json::array();
  for (const auto& s : t.steps) steps.push_back(s);
  return Json{{"contradiction", t.contradiction},
              {"final_line", t.final_line},
              {"forced", forced},
              {"forced_sum", t.forced_sum.str()},
              {"required", t.required.str()},
              {"steps", steps}};
}

int cmd_axioms(int universe_n, const std::vector<std::string>& extra_aggregators, CommonFlags flags) {
  std::vector<axp::Aggregator> aggs = {
      axp::builtin_aggregator(axp::IndexKind::HollerPackel),
      axp::builtin_aggregator(axp::IndexKind::DeeganPackel),
      axp::builtin_aggregator(axp::IndexKind::Responsibility),
  };
  for (const auto& name : extra_aggregators) aggs.push_back(named_control(name));

  auto matrix = axp::run_axiom_matrix(aggs, universe_n);
  auto impossibility = axp::demonstrate_impossibility();
  auto count_consistency = axp::demonstrate_impossibility(axp::count_axps_target());
  auto sum_consistency = axp::demonstrate_impossibility(axp::sum_memberships_target());

  if (flags.format == "json") {
    Json rows = Json::object();
    for (const auto& [agg, row] : matrix.by_aggregator) {
      Json cells = Json::object();
      for (const auto& [axiom, report] : row) cells[axiom] = report_to_json(report);
      rows[agg] = cells;
    }
    Json out{{"impossibility", transcript_to_json(impossibility)},
             {"consistency", Json{{"count", transcript_to_json(count_consistency)},
                                  {"sum-memberships", transcript_to_json(sum_consistency)}}},
             {"matrix", rows},
             {"universe_n", universe_n}};
    emit(flags, axp::canonical_dump(out), base_manifest("axioms", flags));
    return kExitOk;
  }

  std::string text;
  text += "axiom matrix (universe n=" + std::to_string(universe_n) + ")\n";
  for (const auto& [agg, row] : matrix.by_aggregator) {
    text += "\n" + agg + "\n";
    for (const auto& axiom : matrix.axioms) {
      const auto& report = row.at(axiom);
      text += "  " + axiom + ": " + (report.satisfied ? "pass" : "FAIL") + "\n";
      if (!report.satisfied && report.counterexample)
        text += "    counterexample: " + report.counterexample->relation + "\n";
    }
  }
  text += "\nimpossibility derivation (1-efficiency):\n";
  for (const auto& s : impossibility.steps) text += "  " + s + "\n";
  text += "same derivation with the count target: " + count_consistency.final_line + "\n";
  text += "same derivation with the sum-memberships target: " + sum_consistency.final_line + "\n";

  Json manifest = base_manifest("axioms", flags);
  emit(flags, text, manifest);
  return kExitOk;
}

int cmd_attack(const std::string& config_path, const std::string& index, std::uint64_t seed,
               bool seed_given, int workers, CommonFlags flags) {
  auto cfg = axp::attack_config_from_json(axp::load_json_file(config_path));
  if (seed_given) cfg.dataset.seed = seed;

  auto dataset = axp::generate_dataset(cfg.spec, cfg.dataset);

  axp::FrequencyTable merged;
  for (auto kind : parse_indices(index)) {
    auto table = axp::run_experiment(cfg.spec, dataset, kind, std::nullopt, workers);
    merged.points = table.points;
    merged.truncated += table.truncated;
    merged.duality_spot_failures += table.duality_spot_failures;
    for (auto& row : table.rows) merged.rows.push_back(std::move(row));
  }

  Json manifest = base_manifest("attack", flags);
  manifest["input_paths"] = Json{{"config", config_path}};
  manifest["index"] = index;
  manifest["seed"] = cfg.dataset.seed;

  if (flags.format == "json") {
    Json rows = Json::array();
    for (const auto& r : merged.rows)
      rows.push_back(Json{{"feature", r.feature},
                          {"first", r.top1},
                          {"method", r.method},
                          {"second", r.top2},
                          {"third", r.top3}});
    Json out{{"in_fraction", dataset.in_fraction},
             {"points", merged.points},
             {"rows", rows},
             {"truncated", merged.truncated}};
    emit(flags, axp::canonical_dump(out), manifest);
  } else {
    emit(flags, axp::frequency_table_csv(merged), manifest);
  }
  return kExitOk;
}

struct VerifyOutcome {
  long long sufficiency_checks = 0;
  long long enumerations = 0;
  std::vector<std::string> mismatches;
};

void verify_problem(const axp::Problem& p, bool all_subsets, int spot_subsets,
                    axp::SplitMix64& rng, VerifyOutcome& out) {
  auto marco = axp::enumerate_explanations(p);
  auto lattice = axp::enumerate_bruteforce(p);
  ++out.enumerations;
  if (marco.axps != lattice.axps || marco.cxps != lattice.cxps)
    out.mismatches.push_back("enumeration disagreement (n=" + std::to_string(p.n()) + ")");
  if (!axp::check_duality(marco)) out.mismatches.push_back("duality violation");

  auto check_subset = [&](axp::FeatureSubset s) {
    bool structural = axp::is_sufficient(p, s);
    bool brute = axp::is_sufficient_bruteforce(p, s);
    ++out.sufficiency_checks;
    if (structural != brute) {
      std::string members;
      for (int i : s.members()) members += (members.empty() ? "" : ",") + std::to_string(i);
      out.mismatches.push_back("sufficiency disagreement on {" + members + "}");
    }
  };
  if (all_subsets) {
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << p.n()); ++bits)
      check_subset(axp::FeatureSubset(bits));
  } else {
    for (int k = 0; k < spot_subsets; ++k) check_subset(axp::random_subset(rng, p.n()));
  }
}

int cmd_verify(const std::string& model_path, const std::string& instance_path, int trials,
               std::uint64_t seed, int max_n, int max_domain, CommonFlags flags) {
  VerifyOutcome outcome;
  axp::SplitMix64 rng(seed);

  if (!model_path.empty()) {
    auto [space, model] = axp::problem_file_from_json(axp::load_json_file(model_path));
    auto instance = axp::instance_from_json(axp::load_json_file(instance_path));
    auto p = axp::Problem::make(space, model, instance);
    verify_problem(p, /*all_subsets=*/true, 0, rng, outcome);
  } else {
    axp::RandomModelOptions opt;
    opt.max_features = max_n;
    opt.max_domain = max_domain;
    for (int t = 0; t < trials; ++t) {
      auto p = axp::random_problem(rng, opt);
      verify_problem(p, /*all_subsets=*/false, 20, rng, outcome);
    }
  }

  std::string text;
  text += "enumerations compared: " + std::to_string(outcome.enumerations) + "\n";
  text += "sufficiency checks: " + std::to_string(outcome.sufficiency_checks) + "\n";
  if (outcome.mismatches.empty()) {
    text += "agree\n";
  } else {
    for (const auto& m : outcome.mismatches) text += "MISMATCH: " + m + "\n";
  }
  Json manifest = base_manifest("verify", flags);
  manifest["seed"] = seed;
  if (!model_path.empty())
    manifest["input_paths"] = Json{{"instance", instance_path}, {"model", model_path}};
  emit(flags, text, manifest);
  return outcome.mismatches.empty() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"complete abductive explanations, power-index feature scores, "
               "axiom checks and the gated-model robustness harness"};
  app.require_subcommand(1);

  // explain
  auto* explain = app.add_subcommand("explain", "enumerate explanations and score features");
  std::string model_path, instance_path;
  std::string index = "all", normalization = "raw", oracle = "structural";
  int limit = 0;
  CommonFlags explain_flags{"", "json"};
  explain->add_option("--model", model_path, "model JSON file")->required();
  explain->add_option("--instance", instance_path, "instance JSON file")->required();
  explain->add_option("--index", index, "hp|dp|resp|all");
  explain->add_option("--normalize", normalization, "raw|powerset|sum");
  explain->add_option("--oracle", oracle, "structural|brute|cross");
  explain->add_option("--limit", limit, "max reported explanations (0 = none)");
  explain->add_option("--out", explain_flags.out, "output path (stdout if omitted)");
  explain->add_option("--format", explain_flags.format, "json|csv");

  // axioms
  auto* axioms = app.add_subcommand("axioms", "run the axiom suite and impossibility derivation");
  int universe_n = 4;
  std::vector<std::string> extra_aggregators;
  CommonFlags axioms_flags{"", "text"};
  axioms->add_option("--universe-n", universe_n, "antichain universe size (<= 6)");
  axioms->add_option("--aggregator", extra_aggregators,
                     "extra control aggregators (constant-one|position-biased|"
                     "half-holler-packel|squared-deegan-packel)");
  axioms->add_option("--out", axioms_flags.out, "output path (stdout if omitted)");
  axioms->add_option("--format", axioms_flags.format, "text|json");

  // attack
  auto* attack = app.add_subcommand("attack", "run the gated-model robustness experiment");
  std::string config_path, attack_index = "all";
  std::uint64_t attack_seed = 0;
  int workers = 1;
  CommonFlags attack_flags{"", "csv"};
  attack->add_option("--config", config_path, "attack config JSON file")->required();
  attack->add_option("--index", attack_index, "hp|dp|resp|all");
  auto* seed_opt = attack->add_option("--seed", attack_seed, "dataset seed override");
  attack->add_option("--workers", workers, "worker threads");
  attack->add_option("--out", attack_flags.out, "output path (stdout if omitted)");
  attack->add_option("--format", attack_flags.format, "csv|json");

  // verify
  auto* verify = app.add_subcommand("verify", "cross-check structural procedures against oracles");
  std::string v_model, v_instance;
  int trials = 100, max_n = 8, max_domain = 3;
  std::uint64_t v_seed = 1;
  CommonFlags verify_flags{"", "text"};
  verify->add_option("--model", v_model, "model JSON file (fixture mode)");
  verify->add_option("--instance", v_instance, "instance JSON file (fixture mode)");
  verify->add_option("--trials", trials, "random models to verify (fuzz mode)");
  verify->add_option("--seed", v_seed, "fuzz seed");
  verify->add_option("--max-n", max_n, "max features for fuzz models");
  verify->add_option("--max-domain", max_domain, "max domain size for fuzz models");
  verify->add_option("--out", verify_flags.out, "output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*explain)
      return cmd_explain(model_path, instance_path, index, normalization, oracle, limit,
                         explain_flags);
    if (*axioms) return cmd_axioms(universe_n, extra_aggregators, axioms_flags);
    if (*attack)
      return cmd_attack(config_path, attack_index, attack_seed, seed_opt->count() > 0, workers,
                        attack_flags);
    if (*verify) {
      if (v_model.empty() != v_instance.empty()) {
        std::cerr << "verify: --model and --instance go together\n";
        return kExitUsage;
      }
      return cmd_verify(v_model, v_instance, trials, v_seed, max_n, max_domain, verify_flags);
    }
  } catch (const axp::OracleCapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOracleCap;
  } catch (const axp::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const axp::ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

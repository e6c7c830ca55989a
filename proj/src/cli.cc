/*
 * Copyright 2026 The Fairsynth Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fairsynth/cli.h"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <optional>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "fairsynth/evaluation.h"
#include "fairsynth/json_io.h"
#include "fairsynth/model.h"
#include "fairsynth/render.h"
#include "fairsynth/stability.h"
#include "fairsynth/synthesis.h"
#include "json.hpp"

namespace fairsynth {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct RunConfig {
  std::string model_path;
  std::string sensitive;
  std::string max_iters = "6";
  std::vector<std::string> datasets;
  size_t random = 0;
  uint64_t seed = 0;
  size_t top_k = 10;
  std::string out_path;
  std::string unstable_path;
  std::string formulas_path;
  int threads = 0;
  size_t max_classes = kDefaultMaxClasses;
  size_t max_candidates = kDefaultMaxCandidates;
};

// Failure carrying the process exit code.
struct CliError {
  int code;
  std::string message;
};

int ExitCodeFor(const absl::Status& status) {
  return status.code() == absl::StatusCode::kResourceExhausted
             ? kExitResourceLimit
             : kExitUsage;
}

template <typename T>
T OrThrow(absl::StatusOr<T> value) {
  if (!value.ok()) {
    throw CliError{ExitCodeFor(value.status()),
                   std::string(value.status().message())};
  }
  return *std::move(value);
}

void OrThrow(const absl::Status& status) {
  if (!status.ok()) {
    throw CliError{ExitCodeFor(status), std::string(status.message())};
  }
}

int64_t MillisSince(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               start)
      .count();
}

int EffectiveThreads(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Names, one-hot group names (all columns of the group) or numeric ids.
std::vector<FeatureId> ResolveSensitive(const std::string& spec,
                                        const FeatureMetadata& metadata) {
  std::vector<FeatureId> out;
  for (absl::string_view raw : absl::StrSplit(spec, ',', absl::SkipEmpty())) {
    const std::string name(absl::StripAsciiWhitespace(raw));
    if (auto f = metadata.FindByName(name)) {
      out.push_back(*f);
      continue;
    }
    if (auto members = metadata.GroupMembers(name); !members.empty()) {
      out.insert(out.end(), members.begin(), members.end());
      continue;
    }
    int id = -1;
    if (absl::SimpleAtoi(name, &id) && id >= 0 &&
        static_cast<size_t>(id) < metadata.size()) {
      out.push_back(id);
      continue;
    }
    throw CliError{kExitUsage, absl::StrCat("unknown feature \"", name, "\"")};
  }
  if (out.empty()) {
    throw CliError{kExitUsage, "no sensitive feature given (--sensitive)"};
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<int> ParseMaxIters(const std::string& text) {
  if (text == "inf") return std::nullopt;
  int n = 0;
  if (!absl::SimpleAtoi(text, &n) || n < 1) {
    throw CliError{kExitUsage,
                   absl::StrCat("--max-iters must be a positive integer or "
                                "\"inf\", got \"",
                                text, "\"")};
  }
  return n;
}

void Emit(const RunConfig& cfg, const json& j, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (cfg.out_path.empty()) {
    out << text;
  } else {
    OrThrow(WriteFile(cfg.out_path, text));
  }
}

UnstableSet LoadOrAnalyze(const RunConfig& cfg, const Ensemble& ensemble,
                          const std::vector<FeatureId>& sensitive,
                          std::ostream& out, int64_t* elapsed_ms) {
  const auto start = Clock::now();
  UnstableSet unstable;
  if (!cfg.unstable_path.empty()) {
    unstable = OrThrow(UnstableSetFromJson(OrThrow(ReadFile(cfg.unstable_path)),
                                           ensemble.num_features()));
  } else {
    AnalysisOptions options;
    options.max_classes = cfg.max_classes;
    unstable = OrThrow(Analyze(ensemble, sensitive, options));
  }
  *elapsed_ms = MillisSince(start);
  out << "analyze: " << unstable.size() << " unstable rectangles ("
      << *elapsed_ms << " ms)\n";
  return unstable;
}

SynthesisOptions MakeSynthesisOptions(const RunConfig& cfg) {
  SynthesisOptions options;
  options.max_iters = ParseMaxIters(cfg.max_iters);
  options.max_candidates = cfg.max_candidates;
  options.threads = EffectiveThreads(cfg.threads);
  return options;
}

void ReportIterations(const FormulaSet& formulas, std::ostream& out) {
  for (const IterationStats& s : formulas.per_iteration) {
    out << "iteration " << s.iteration << ": +" << s.added
        << " conditions, " << s.candidates << " candidates\n";
  }
}

int CmdAnalyze(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const Ensemble ensemble = OrThrow(LoadModel(cfg.model_path));
  const auto sensitive = ResolveSensitive(cfg.sensitive, ensemble.metadata());
  int64_t elapsed = 0;
  const UnstableSet unstable =
      LoadOrAnalyze(cfg, ensemble, sensitive, log, &elapsed);
  Emit(cfg, UnstableSetToJson(unstable), out);
  return kExitOk;
}

int CmdSynthesize(const RunConfig& cfg, std::ostream& out, std::ostream& log,
                  std::ostream& err) {
  const Ensemble ensemble = OrThrow(LoadModel(cfg.model_path));
  const auto sensitive = ResolveSensitive(cfg.sensitive, ensemble.metadata());
  const SynthesisOptions options = MakeSynthesisOptions(cfg);
  int64_t analyze_ms = 0;
  const UnstableSet unstable =
      LoadOrAnalyze(cfg, ensemble, sensitive, log, &analyze_ms);

  const auto start = Clock::now();
  const FormulaSet formulas =
      SynthesizeFrom(unstable, ensemble.metadata(), options);
  const int64_t synth_ms = MillisSince(start);
  ReportIterations(formulas, log);
  log << "synthesize: " << formulas.size() << " conditions in "
      << formulas.iterations << " iterations, "
      << (formulas.converged ? "converged" : "not converged") << " ("
      << synth_ms << " ms)\n";

  const auto rendered = RenderFormulas(formulas.itemsets, ensemble.metadata());
  Emit(cfg, FormulaFileToJson(formulas, rendered, analyze_ms + synth_ms), out);
  if (formulas.resource_limit_hit) {
    err << "warning: " << formulas.warning << "\n";
    return kExitResourceLimit;
  }
  return kExitOk;
}

std::vector<std::pair<std::string, InstanceSet>> LoadDatasets(
    const RunConfig& cfg, const Ensemble& ensemble) {
  std::vector<std::pair<std::string, InstanceSet>> out;
  for (const std::string& path : cfg.datasets) {
    InstanceSet data =
        OrThrow(ReadDatasetCsv(path, ensemble, Provenance::kTest));
    OrThrow(ValidateInstances(data, ensemble.metadata()));
    out.emplace_back(path, std::move(data));
  }
  if (cfg.random > 0) {
    out.emplace_back("random",
                     GenRandomInstances(ensemble.metadata(), cfg.random,
                                        cfg.seed));
  }
  if (out.empty()) {
    throw CliError{kExitUsage, "no instances: pass --dataset or --random"};
  }
  return out;
}

int CmdEvaluate(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const Ensemble ensemble = OrThrow(LoadModel(cfg.model_path));
  const auto sensitive = ResolveSensitive(cfg.sensitive, ensemble.metadata());
  const auto datasets = LoadDatasets(cfg, ensemble);

  int64_t analyze_ms = 0;
  const UnstableSet unstable =
      LoadOrAnalyze(cfg, ensemble, sensitive, log, &analyze_ms);

  auto start = Clock::now();
  FormulaSet formulas;
  if (!cfg.formulas_path.empty()) {
    FormulaFile file = OrThrow(FormulaFileFromJson(
        OrThrow(ReadFile(cfg.formulas_path)), ensemble.num_features()));
    formulas.itemsets = std::move(file.formulas);
    formulas.found_at = std::move(file.found_at);
    formulas.converged = file.converged;
    formulas.iterations = file.iterations;
  } else {
    formulas = SynthesizeFrom(unstable, ensemble.metadata(),
                              MakeSynthesisOptions(cfg));
    ReportIterations(formulas, log);
  }
  const int64_t synth_ms = MillisSince(start);
  const int k_max = std::max(formulas.iterations, 1);

  start = Clock::now();
  const DiscriminationOracle oracle(ensemble, sensitive);
  json reports = json::array();
  for (const auto& [name, data] : datasets) {
    json r = {{"name", name},
              {"instances", data.size()},
              {"d", OrThrow(ScoreD(unstable, data))},
              {"unstable_count", CountUnstable(unstable, data)},
              {"dtilde", OrThrow(ScoreDTilde(formulas.itemsets, data))},
              {"uncovered_count",
               data.size() - CountCovered(formulas.itemsets, data)}};
    if (auto a = Accuracy(ensemble, data)) r["accuracy"] = *a;
    json curve = json::array();
    for (const CoveragePoint& p :
         CoverageCurve(formulas, oracle, data, k_max)) {
      curve.push_back({{"iteration", p.iteration},
                       {"covered", p.covered},
                       {"fair", p.fair},
                       {"fraction", p.fraction}});
    }
    r["coverage_curve"] = curve;
    log << name << ": d = " << r["d"].get<double>()
        << ", d~ = " << r["dtilde"].get<double>();
    if (r.contains("accuracy")) {
      log << ", a = " << r["accuracy"].get<double>();
    }
    log << "\n";
    reports.push_back(std::move(r));
  }
  const int64_t eval_ms = MillisSince(start);
  log << "evaluate: " << eval_ms << " ms\n";

  json report = {{"unstable_rectangles", unstable.size()},
                 {"formulas", formulas.size()},
                 {"converged", formulas.converged},
                 {"datasets", reports},
                 {"timing_ms",
                  {{"analyze", analyze_ms},
                   {"synthesize", synth_ms},
                   {"evaluate", eval_ms}}}};
  Emit(cfg, report, out);
  return kExitOk;
}

int CmdRank(const RunConfig& cfg, std::ostream& out) {
  if (cfg.top_k == 0) throw CliError{kExitUsage, "k must be positive"};
  if (cfg.formulas_path.empty()) {
    throw CliError{kExitUsage, "rank needs --formulas"};
  }
  const Ensemble ensemble = OrThrow(LoadModel(cfg.model_path));
  const FormulaFile file = OrThrow(FormulaFileFromJson(
      OrThrow(ReadFile(cfg.formulas_path)), ensemble.num_features()));
  const auto datasets = LoadDatasets(cfg, ensemble);
  const InstanceSet& data = datasets.front().second;

  const auto ranked = TopKGreedy(file.formulas, data, cfg.top_k);
  json rows = json::array();
  out << "rank  marginal  covered  formula\n";
  for (size_t r = 0; r < ranked.size(); ++r) {
    const Itemset& itemset = file.formulas[ranked[r].index];
    const std::string text =
        RenderFormulas(std::span<const Itemset>(&itemset, 1),
                       ensemble.metadata())
            .front()
            .text;
    out << std::setw(4) << r + 1 << "  " << std::setw(8) << ranked[r].marginal
        << "  " << std::setw(7) << ranked[r].covered << "  " << text << "\n";
    rows.push_back({{"rank", r + 1},
                    {"formula", ItemsetToJson(itemset)},
                    {"rendered", text},
                    {"marginal", ranked[r].marginal},
                    {"covered", ranked[r].covered}});
  }
  json report = {{"dataset", datasets.front().first},
                 {"instances", data.size()},
                 {"top_k", rows}};
  if (!cfg.out_path.empty()) OrThrow(WriteFile(cfg.out_path, report.dump(2) + "\n"));
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app("Synthesizes sufficient conditions for the absence of causal "
               "discrimination in decision-tree ensembles.",
               "fairsynth");
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model_path, "Model JSON file")->required();
  };
  auto add_sensitive = [&](CLI::App* sub) {
    sub->add_option("--sensitive", cfg.sensitive,
                    "Sensitive features: names, one-hot group names or ids, "
                    "comma separated")
        ->required();
  };
  auto add_limits = [&](CLI::App* sub) {
    sub->add_option("--threads", cfg.threads,
                    "Worker threads (default: available cores)");
    sub->add_option("--max-classes", cfg.max_classes,
                    "Equivalence class limit of the stability analysis");
    sub->add_option("--max-candidates", cfg.max_candidates,
                    "Candidate itemset limit of the synthesis");
    sub->add_option("--unstable", cfg.unstable_path,
                    "Reuse an unstable-region file written by analyze");
  };
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--dataset", cfg.datasets, "Preprocessed CSV file(s)");
    sub->add_option("--random", cfg.random, "Also score N random instances");
    sub->add_option("--seed", cfg.seed, "Seed for random instances");
  };

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Compute the rectangles where the model may discriminate");
  add_model(analyze);
  add_sensitive(analyze);
  add_limits(analyze);
  analyze->add_option("--out", cfg.out_path, "Output JSON file");

  CLI::App* synthesize =
      app.add_subcommand("synthesize", "Synthesize fairness conditions");
  add_model(synthesize);
  add_sensitive(synthesize);
  add_limits(synthesize);
  synthesize->add_option("--max-iters", cfg.max_iters,
                         "Iteration bound, or \"inf\" (default 6)");
  synthesize->add_option("--out", cfg.out_path, "Output JSON file");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score conditions on instance sets");
  add_model(evaluate);
  add_sensitive(evaluate);
  add_limits(evaluate);
  add_data(evaluate);
  evaluate->add_option("--formulas", cfg.formulas_path,
                       "Synthesis output file (default: synthesize now)");
  evaluate->add_option("--max-iters", cfg.max_iters,
                       "Iteration bound when synthesizing (default 6)");
  evaluate->add_option("--out", cfg.out_path, "Report JSON file");

  CLI::App* rank =
      app.add_subcommand("rank", "Rank conditions by greedy coverage");
  add_model(rank);
  add_data(rank);
  rank->add_option("--formulas", cfg.formulas_path, "Synthesis output file")
      ->required();
  rank->add_option("--top-k", cfg.top_k, "Number of conditions to report");
  rank->add_option("--out", cfg.out_path, "Report JSON file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    // Progress goes to stderr while stdout carries the JSON result.
    std::ostream& log = cfg.out_path.empty() ? err : out;
    if (analyze->parsed()) return CmdAnalyze(cfg, out, log);
    if (synthesize->parsed()) return CmdSynthesize(cfg, out, log, err);
    if (evaluate->parsed()) return CmdEvaluate(cfg, out, log);
    return CmdRank(cfg, out);
  } catch (const CliError& e) {
    err << "error: " << e.message << "\n";
    return e.code;
  }
}

}  // namespace fairsynth

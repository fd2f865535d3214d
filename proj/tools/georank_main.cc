/*
 * Copyright 2026 The georank Authors.
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

// Command-line front end: gen-data, train, evaluate, rank, crossk, gradcheck,
// config-schema.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "georank/adjacency.h"
#include "georank/crossk.h"
#include "georank/errors.h"
#include "georank/grad_suite.h"
#include "georank/importance.h"
#include "georank/io_util.h"
#include "georank/model.h"
#include "georank/rank_metrics.h"
#include "georank/run_config.h"
#include "georank/trainer.h"
#include "nlohmann/json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace georank {
namespace {

constexpr const char* kVersion = "0.1.0";

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kConfigFailure = 2,
  kDataFailure = 3,
  kNumericalFailure = 4,
  kGradCheckFailure = 5,
};

struct CommonFlags {
  std::string config_path;
  std::string out;
  std::string data;
  std::vector<std::string> sets;  // key.path=value
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::optional<double> sigma;
  std::optional<std::size_t> threads;
};

void AddCommonFlags(CLI::App* app, CommonFlags& f) {
  app->add_option("-c,--config", f.config_path, "JSON run config");
  app->add_option("-o,--out", f.out, "Output directory (overrides config)");
  app->add_option("--data", f.data, "Dataset manifest (overrides config)");
  app->add_option("--set", f.sets,
                  "Override a config value: dotted.key=json_value")
      ->take_all();
  app->add_option("--seed", f.seed,
                  "Seed for data synthesis, model init and training");
  app->add_option("--epochs", f.epochs, "train.epochs");
  app->add_option("--sigma", f.sigma, "train.surrogate.sigma");
  app->add_option("--threads", f.threads, "Worker threads");
}

void ApplySet(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set expects key.path=value, got '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  json* node = &j;
  std::size_t begin = 0;
  while (true) {
    const auto dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot - begin);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    begin = dot + 1;
  }
}

// Flags beat the environment, which beats the config file.
RunConfig ResolveConfig(const CommonFlags& f) {
  json j = json::object();
  if (!f.config_path.empty()) {
    j = RunConfigToJson(LoadRunConfig(f.config_path));
  }
  if (const char* env = std::getenv("GEORANK_OUTPUT_DIR"); env && *env) {
    j["output_dir"] = env;
  }
  for (const std::string& s : f.sets) ApplySet(j, s);
  if (!f.out.empty()) j["output_dir"] = f.out;
  if (!f.data.empty()) j["data"]["manifest"] = f.data;
  if (f.seed) {
    j["data"]["synthetic"]["seed"] = *f.seed;
    j["model"]["seed"] = *f.seed;
    j["train"]["seed"] = *f.seed;
  }
  if (f.epochs) j["train"]["epochs"] = *f.epochs;
  if (f.sigma) j["train"]["surrogate"]["sigma"] = *f.sigma;
  if (f.threads) j["train"]["threads"] = *f.threads;
  return RunConfigFromJson(j);
}

StGrid LoadData(const RunConfig& config) {
  if (!config.data.manifest.empty()) return LoadGrid(config.data.manifest);
  return GenerateSyntheticDataset(config.data.synthetic).grid;
}

void WriteRunRecord(const RunConfig& config, const std::string& command) {
  const json record = {{"command", command},
                       {"config_hash", ConfigHash(config)},
                       {"seed", config.train.seed},
                       {"version", kVersion},
                       {"compiler", __VERSION__},
                       {"config", RunConfigToJson(config)}};
  WriteTextFile(fs::path(config.output_dir) / "run.json",
                record.dump(2) + "\n");
}

int GenData(const RunConfig& config) {
  const StGrid grid = GenerateSyntheticDataset(config.data.synthetic).grid;
  const fs::path manifest = SaveGrid(grid, fs::path(config.output_dir) / "data");
  WriteRunRecord(config, "gen-data");
  std::cout << manifest.string() << "\n";
  return kOk;
}

int TrainCommand(const RunConfig& config, bool dump_adjacency) {
  const StGrid grid = LoadData(config);
  const Splits splits =
      ChronologicalSplit(grid.periods(), config.data.train_fraction);
  const fs::path out(config.output_dir);
  const TrainState state = Train(grid, splits, config.model, config.train);
  SaveCheckpoint(state.best, splits.train_end, out / "model.json");
  WriteTextFile(out / "train_log.csv",
                TrainLogCsv(state.log, config.train.eval_k, false));
  // Wall times live apart so that train_log.csv is reproducible.
  std::string timing = "epoch,wall_time_s\n";
  for (const EpochLog& e : state.log) {
    timing += std::to_string(e.epoch) + "," + FormatDouble(e.wall_time_s) + "\n";
  }
  WriteTextFile(out / "timing.csv", timing);
  WriteImportanceCsv(state.importance, grid.dims(), out / "importance.csv");
  if (dump_adjacency) {
    WriteAdjacencyCsv(PearsonStatic(grid, splits.train_end),
                      out / "a_static.csv");
  }
  WriteRunRecord(config, "train");
  std::printf("trained %zu epochs; best epoch %zu, val NDCG@%zu = %s\n",
              state.epoch, state.best_epoch, config.train.eval_k,
              FormatDouble(state.best_val).c_str());
  return kOk;
}

struct PredictorChoice {
  std::string predictor = "model";  // model | untrained | ha | oracle
  std::string checkpoint;
  std::string split = "val";
};

void AddPredictorFlags(CLI::App* app, PredictorChoice& p) {
  app->add_option("--predictor", p.predictor, "model, untrained, ha or oracle")
      ->check(CLI::IsMember({"model", "untrained", "ha", "oracle"}));
  app->add_option("--checkpoint", p.checkpoint,
                  "Model manifest (default <out>/model.json)");
  app->add_option("--split", p.split, "train or val")
      ->check(CLI::IsMember({"train", "val"}));
}

Predictions Predict(const RunConfig& config, const StGrid& grid,
                    const PredictorChoice& choice,
                    const std::vector<Window>& windows) {
  const Splits splits =
      ChronologicalSplit(grid.periods(), config.data.train_fraction);
  if (choice.predictor == "ha") {
    return ConstantPredictions(HistoricalAverage(grid, splits), windows);
  }
  if (choice.predictor == "oracle") {
    Predictions out;
    for (const Window& w : windows) {
      const auto y = grid.RiskAt(w.target);
      out.push_back(DayScores{w.target, std::vector<double>(y.begin(), y.end())});
    }
    return out;
  }
  if (choice.predictor == "untrained") {
    const ModelParams params =
        ModelParams::Init(config.model, ModelDims::FromGrid(grid));
    return PredictWindows(params, grid, PearsonStatic(grid, splits.train_end),
                          windows, config.train.threads);
  }
  const fs::path path = choice.checkpoint.empty()
                            ? fs::path(config.output_dir) / "model.json"
                            : fs::path(choice.checkpoint);
  const Checkpoint ckpt = LoadCheckpoint(path);
  return PredictWindows(ckpt.params, grid,
                        PearsonStatic(grid, ckpt.train_end), windows,
                        config.train.threads);
}

std::vector<Window> SplitWindows(const RunConfig& config, const StGrid& grid,
                                 const std::string& split) {
  const Splits splits =
      ChronologicalSplit(grid.periods(), config.data.train_fraction);
  return split == "train" ? TrainWindows(grid, config.model.window, splits)
                          : ValidationWindows(grid, config.model.window, splits);
}

int Evaluate(const RunConfig& config, const PredictorChoice& choice,
             const std::string& name) {
  const StGrid grid = LoadData(config);
  const std::vector<Window> windows = SplitWindows(config, grid, choice.split);
  const RankingReport report =
      MetricReport(grid, Predict(config, grid, choice, windows),
                   config.eval.ks, config.eval.radius, choice.split);
  const fs::path out(config.output_dir);
  WriteTextFile(out / (name + ".json"), report.ToJson());
  WriteTextFile(out / (name + ".csv"), report.ToCsv());
  WriteRunRecord(config, "evaluate");
  std::cout << report.ToCsv();
  return kOk;
}

int Rank(const RunConfig& config, const PredictorChoice& choice,
         std::optional<std::size_t> day, std::size_t k) {
  const StGrid grid = LoadData(config);
  const std::size_t n = config.model.window;
  const std::size_t target = day.value_or(grid.periods() - 1);
  if (target < n || target >= grid.periods()) {
    throw ConfigError("--day must lie in [" + std::to_string(n) + ", " +
                      std::to_string(grid.periods() - 1) + "]");
  }
  const std::vector<Window> windows = {Window{target - n, n, target}};
  const Predictions pred = Predict(config, grid, choice, windows);
  const std::size_t shown = k == 0 ? grid.locations() : k;
  std::printf("rank,location,row,col,score\n");
  std::size_t r = 1;
  for (const auto& [loc, score] : TopK(pred.front().scores, shown)) {
    const Cell c = ToCell(grid.dims(), loc);
    std::printf("%zu,%zu,%zu,%zu,%s\n", r++, loc, c.row, c.col,
                FormatDouble(score).c_str());
  }
  return kOk;
}

int CrossKCommand(const RunConfig& config, const PredictorChoice& choice) {
  const StGrid grid = LoadData(config);
  const std::vector<Window> windows = SplitWindows(config, grid, choice.split);
  const Predictions pred = Predict(config, grid, choice, windows);
  std::vector<std::vector<double>> scores, truth;
  for (const DayScores& d : pred) {
    scores.push_back(d.scores);
    const auto y = grid.RiskAt(d.target);
    truth.emplace_back(y.begin(), y.end());
  }
  const CrossKConfig& ck = config.eval.crossk;
  const CrossKCurve curve = DailyCrossK(
      scores, truth, grid.dims(), ck.k, DistanceGrid(ck.max_distance, ck.step),
      ToEnvelopeOptions(ck, config.train.threads));
  const fs::path path =
      fs::path(config.output_dir) / ("crossk_" + choice.predictor + ".csv");
  WriteTextFile(path, curve.ToCsv());
  WriteRunRecord(config, "crossk");
  std::cout << curve.ToCsv();
  return kOk;
}

int GradCheckCommand(const RunConfig& config, std::size_t coordinates) {
  GradSuiteOptions options;
  options.seed = config.model.seed;
  options.coordinates = coordinates;
  bool ok = true;
  for (const GradSuiteResult& r : RunGradientSuite(options)) {
    std::printf("%-18s %s  max_rel_err=%.3e checked=%zu excluded=%zu\n",
                r.name.c_str(), r.report.passed ? "PASS" : "FAIL",
                r.report.max_relative_error, r.report.checked,
                r.report.excluded);
    ok = ok && r.report.passed;
  }
  return ok ? kOk : kGradCheckFailure;
}

int Main(int argc, char** argv) {
  CLI::App app{"georank: spatiotemporal risk ranking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommonFlags common;
  PredictorChoice choice;
  bool dump_adjacency = false;
  std::string report_name = "report";
  std::optional<std::size_t> day;
  std::size_t rank_k = 10;
  std::size_t coordinates = 150;

  CLI::App* gen = app.add_subcommand("gen-data", "Write a synthetic dataset");
  AddCommonFlags(gen, common);
  CLI::App* train = app.add_subcommand("train", "Train and save the best model");
  AddCommonFlags(train, common);
  train->add_flag("--dump-adjacency", dump_adjacency,
                  "Also write the static adjacency as CSV");
  CLI::App* eval = app.add_subcommand("evaluate", "Write a ranking report");
  AddCommonFlags(eval, common);
  AddPredictorFlags(eval, choice);
  eval->add_option("--name", report_name, "Report file stem");
  CLI::App* rank = app.add_subcommand("rank", "Print the top-K table for a day");
  AddCommonFlags(rank, common);
  AddPredictorFlags(rank, choice);
  rank->add_option("--day", day, "Target period (default: last)");
  rank->add_option("-k,--k", rank_k, "Rows to print; 0 prints all");
  CLI::App* crossk = app.add_subcommand("crossk", "Write Cross-K curves");
  AddCommonFlags(crossk, common);
  AddPredictorFlags(crossk, choice);
  CLI::App* grad = app.add_subcommand("gradcheck", "Finite-difference suite");
  AddCommonFlags(grad, common);
  grad->add_option("--coordinates", coordinates,
                   "Coordinates sampled per model check");
  CLI::App* schema =
      app.add_subcommand("config-schema", "Print the default config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  try {
    if (schema->parsed()) {
      std::cout << RunConfigToJson(RunConfig{}).dump(2) << "\n";
      return kOk;
    }
    const RunConfig config = ResolveConfig(common);
    if (gen->parsed()) return GenData(config);
    if (train->parsed()) return TrainCommand(config, dump_adjacency);
    if (eval->parsed()) return Evaluate(config, choice, report_name);
    if (rank->parsed()) return Rank(config, choice, day, rank_k);
    if (crossk->parsed()) return CrossKCommand(config, choice);
    if (grad->parsed()) return GradCheckCommand(config, coordinates);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataFailure;
  } catch (const ShapeError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataFailure;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace
}  // namespace georank

int main(int argc, char** argv) { return georank::Main(argc, argv); }

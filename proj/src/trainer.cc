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

#include "georank/trainer.h"

#include <chrono>
#include <cmath>
#include <limits>

#include "georank/adjacency.h"
#include "georank/errors.h"
#include "georank/io_util.h"
#include "georank/json_util.h"
#include "georank/parallel.h"
#include "georank/rng.h"

namespace georank {

using ad::Shape;
using ad::Tensor;
using ad::Var;
using nlohmann::json;

std::string WarmupModeName(WarmupMode mode) {
  return mode == WarmupMode::kMse ? "mse" : "bce";
}

WarmupMode ParseWarmupMode(const std::string& name) {
  if (name == "mse") return WarmupMode::kMse;
  if (name == "bce") return WarmupMode::kBce;
  throw ConfigError("unknown warm-up mode '" + name + "'");
}

void TrainConfig::Validate() const {
  if (warmup_epochs > epochs) {
    throw ConfigError("warmup_epochs must not exceed epochs");
  }
  if (!(lr_warmup > 0.0) || !(lr_main > 0.0)) {
    throw ConfigError("learning rates must be > 0");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) || !(adam_eps > 0.0)) {
    throw ConfigError("Adam needs beta1, beta2 in [0, 1) and eps > 0");
  }
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
  if (eval_k == 0) throw ConfigError("eval_k must be >= 1");
  if (threads == 0) throw ConfigError("threads must be >= 1");
  surrogate.Validate();
}

json SurrogateConfigToJson(const SurrogateConfig& c) {
  json j = {{"margin", c.margin},
            {"sigma", c.sigma},
            {"radius", c.radius},
            {"weight_mode", WeightModeName(c.weight_mode)},
            {"sample_fraction", c.sample_fraction},
            {"gain_cap", nullptr}};
  if (c.gain_cap) j["gain_cap"] = *c.gain_cap;
  return j;
}

SurrogateConfig SurrogateConfigFromJson(const json& j) {
  constexpr std::string_view kWhere = "surrogate";
  RejectUnknownKeys(j,
                    {"margin", "sigma", "radius", "weight_mode",
                     "sample_fraction", "gain_cap"},
                    kWhere);
  SurrogateConfig c;
  ReadOptional(j, "margin", c.margin, kWhere);
  ReadOptional(j, "sigma", c.sigma, kWhere);
  ReadOptional(j, "radius", c.radius, kWhere);
  std::string mode = WeightModeName(c.weight_mode);
  ReadOptional(j, "weight_mode", mode, kWhere);
  c.weight_mode = ParseWeightMode(mode);
  ReadOptional(j, "sample_fraction", c.sample_fraction, kWhere);
  if (const auto it = j.find("gain_cap"); it != j.end() && !it->is_null()) {
    double cap = 0.0;
    ReadOptional(j, "gain_cap", cap, kWhere);
    c.gain_cap = cap;
  }
  c.Validate();
  return c;
}

json TrainConfigToJson(const TrainConfig& c) {
  return json{{"epochs", c.epochs},
              {"warmup_epochs", c.warmup_epochs},
              {"lr_warmup", c.lr_warmup},
              {"lr_main", c.lr_main},
              {"adam_beta1", c.adam_beta1},
              {"adam_beta2", c.adam_beta2},
              {"adam_eps", c.adam_eps},
              {"batch_size", c.batch_size},
              {"surrogate", SurrogateConfigToJson(c.surrogate)},
              {"lambda", c.lambda},
              {"importance", c.importance},
              {"warmup_mode", WarmupModeName(c.warmup_mode)},
              {"eval_k", c.eval_k},
              {"patience", c.patience},
              {"seed", c.seed},
              {"threads", c.threads}};
}

TrainConfig TrainConfigFromJson(const json& j) {
  constexpr std::string_view kWhere = "train";
  RejectUnknownKeys(
      j,
      {"epochs", "warmup_epochs", "lr_warmup", "lr_main", "adam_beta1",
       "adam_beta2", "adam_eps", "batch_size", "surrogate", "lambda",
       "importance", "warmup_mode", "eval_k", "patience", "seed", "threads"},
      kWhere);
  TrainConfig c;
  ReadOptional(j, "epochs", c.epochs, kWhere);
  ReadOptional(j, "warmup_epochs", c.warmup_epochs, kWhere);
  ReadOptional(j, "lr_warmup", c.lr_warmup, kWhere);
  ReadOptional(j, "lr_main", c.lr_main, kWhere);
  ReadOptional(j, "adam_beta1", c.adam_beta1, kWhere);
  ReadOptional(j, "adam_beta2", c.adam_beta2, kWhere);
  ReadOptional(j, "adam_eps", c.adam_eps, kWhere);
  ReadOptional(j, "batch_size", c.batch_size, kWhere);
  if (j.contains("surrogate")) {
    c.surrogate = SurrogateConfigFromJson(j.at("surrogate"));
  }
  ReadOptional(j, "lambda", c.lambda, kWhere);
  ReadOptional(j, "importance", c.importance, kWhere);
  std::string warmup = WarmupModeName(c.warmup_mode);
  ReadOptional(j, "warmup_mode", warmup, kWhere);
  c.warmup_mode = ParseWarmupMode(warmup);
  ReadOptional(j, "eval_k", c.eval_k, kWhere);
  ReadOptional(j, "patience", c.patience, kWhere);
  ReadOptional(j, "seed", c.seed, kWhere);
  ReadOptional(j, "threads", c.threads, kWhere);
  c.Validate();
  return c;
}

void Adam::Step(const std::vector<Tensor*>& params,
                const std::vector<Tensor>& grads, double lr) {
  if (params.size() != grads.size()) {
    throw ShapeError("Adam: " + std::to_string(params.size()) +
                     " parameters vs " + std::to_string(grads.size()) +
                     " gradients");
  }
  if (m_.empty()) {
    for (const Tensor* p : params) {
      m_.emplace_back(p->shape());
      v_.emplace_back(p->shape());
    }
  }
  if (m_.size() != params.size()) {
    throw ShapeError("Adam: parameter count changed between steps");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->shape() != grads[i].shape() ||
        m_[i].shape() != grads[i].shape()) {
      throw ShapeError("Adam: gradient shape " +
                       ad::ShapeToString(grads[i].shape()) + " vs parameter " +
                       ad::ShapeToString(params[i]->shape()));
    }
  }
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(beta1_, t);
  const double c2 = 1.0 - std::pow(beta2_, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto w = params[i]->values();
    const auto g = grads[i].values();
    auto m = m_[i].values();
    auto v = v_[i].values();
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = beta1_ * m[k] + (1.0 - beta1_) * g[k];
      v[k] = beta2_ * v[k] + (1.0 - beta2_) * g[k] * g[k];
      w[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps_);
    }
  }
}

Var WarmupLoss(std::span<const double> relevance, Var scores, WarmupMode mode) {
  const std::size_t S = relevance.size();
  if (scores.shape() != Shape{S, 1}) {
    throw ShapeError("warm-up loss: scores " +
                     ad::ShapeToString(scores.shape()) + " vs " +
                     std::to_string(S) + " targets");
  }
  ad::Tape& tape = *scores.tape();
  if (mode == WarmupMode::kMse) {
    const Var y = tape.Constant(
        Tensor(Shape{S, 1}, std::vector<double>(relevance.begin(),
                                                relevance.end())));
    return ad::Mean(ad::Square(scores - y));
  }
  std::vector<double> z(S);
  for (std::size_t s = 0; s < S; ++s) z[s] = relevance[s] > 0.0 ? 1.0 : 0.0;
  const Var zv = tape.Constant(Tensor(Shape{S, 1}, std::move(z)));
  // -z log sigmoid(h) - (1 - z) log(1 - sigmoid(h)) = softplus(h) - z h
  return ad::Mean(ad::Softplus(scores) - ad::Mul(zv, scores));
}

Predictions PredictWindows(const ModelParams& params, const StGrid& grid,
                           const Tensor& a_static,
                           std::span<const Window> windows,
                           std::size_t threads) {
  Predictions out(windows.size());
  ParallelFor(windows.size(), threads, [&](std::size_t i) {
    out[i] = DayScores{windows[i].target,
                       PredictScores(params, grid, a_static, windows[i])};
  });
  return out;
}

std::vector<double> HistoricalAverage(const StGrid& grid,
                                      const Splits& splits) {
  if (splits.train_end == 0 || splits.train_end > grid.periods()) {
    throw DataError("historical average needs a non-empty training split");
  }
  const std::size_t S = grid.locations();
  std::vector<double> out(S, 0.0);
  for (std::size_t t = 0; t < splits.train_end; ++t) {
    const auto y = grid.RiskAt(t);
    for (std::size_t s = 0; s < S; ++s) out[s] += y[s];
  }
  for (double& v : out) v /= static_cast<double>(splits.train_end);
  return out;
}

Predictions ConstantPredictions(std::span<const double> scores,
                                std::span<const Window> windows) {
  Predictions out;
  for (const Window& w : windows) {
    out.push_back(DayScores{w.target,
                            std::vector<double>(scores.begin(), scores.end())});
  }
  return out;
}

std::string TrainLogCsv(const std::vector<EpochLog>& log, std::size_t k,
                        bool include_time) {
  const std::string ks = std::to_string(k);
  std::string out = "epoch,phase,train_obj,val_ndcg@" + ks + ",val_lndcg@" +
                    ks + ",val_prec@" + ks;
  out += include_time ? ",wall_time_s\n" : "\n";
  for (const EpochLog& e : log) {
    out += std::to_string(e.epoch) + ',' + (e.warmup ? "warmup" : "main") +
           ',' + FormatDouble(e.train_obj) + ',' + FormatDouble(e.val_ndcg) +
           ',' + FormatDouble(e.val_lndcg) + ',' + FormatDouble(e.val_prec);
    if (include_time) out += ',' + FormatDouble(e.wall_time_s);
    out += '\n';
  }
  return out;
}

namespace {

struct DayResult {
  double loss = 0.0;
  std::vector<Tensor> grads;
};

bool AllFinite(const Tensor& t) {
  for (double v : t.values()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

TrainState Train(const StGrid& grid, const Splits& splits,
                 const ModelConfig& model_config,
                 const TrainConfig& config, const TrainHooks& hooks) {
  model_config.Validate();
  config.Validate();
  ValidateSplits(grid, splits);
  const std::vector<Window> train_windows =
      TrainWindows(grid, model_config.window, splits);
  const std::vector<Window> val_windows =
      ValidationWindows(grid, model_config.window, splits);
  if (train_windows.empty() || val_windows.empty()) {
    throw DataError("window length " + std::to_string(model_config.window) +
                    " leaves an empty training or validation split");
  }
  if (config.eval_k > grid.locations()) {
    throw ConfigError("eval_k exceeds the number of locations");
  }

  const std::size_t S = grid.locations();
  const Tensor a_static = PearsonStatic(grid, splits.train_end);
  const NeighborhoodTable neighborhoods(grid.dims(),
                                        config.surrogate.radius);
  ModelParams init = ModelParams::Init(model_config, ModelDims::FromGrid(grid));
  TrainState state{init,
                   init,
                   0,
                   -std::numeric_limits<double>::infinity(),
                   Adam(config.adam_beta1, config.adam_beta2, config.adam_eps),
                   0,
                   ImportanceDist::Uniform(S, config.lambda),
                   {}};

  std::vector<std::vector<double>> train_truth;
  for (const Window& w : train_windows) {
    const auto y = grid.RiskAt(w.target);
    train_truth.emplace_back(y.begin(), y.end());
  }

  const auto start = std::chrono::steady_clock::now();
  std::size_t since_best = 0;
  std::vector<std::size_t> order(train_windows.size());
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const bool warmup = epoch <= config.warmup_epochs;
    const double lr = warmup ? config.lr_warmup : config.lr_main;
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(DeriveSeed(config.seed, 2 * epoch));
    shuffle_rng.Shuffle(std::span<std::size_t>(order));
    const std::uint64_t sample_seed = DeriveSeed(config.seed, 2 * epoch + 1);

    double epoch_loss = 0.0;
    for (std::size_t first = 0; first < order.size();
         first += config.batch_size) {
      const std::size_t count =
          std::min(config.batch_size, order.size() - first);
      std::vector<DayResult> days(count);
      ParallelFor(count, config.threads, [&](std::size_t d) {
        const Window& window = train_windows[order[first + d]];
        const auto y = grid.RiskAt(window.target);
        ad::Tape tape;
        const ModelVars vars = BindParams(tape, state.params, true);
        const Var scores =
            Forward(vars, model_config, grid, a_static, window);
        Var loss;
        if (warmup) {
          loss = WarmupLoss(y, scores, config.warmup_mode);
        } else {
          const std::vector<std::size_t> positives = PositiveSet(y);
          std::vector<double> weights(positives.size(), 1.0);
          if (config.importance) {
            Rng rng(DeriveSeed(sample_seed, window.target));
            weights = ApplyImportance(positives, state.importance.probabilities,
                                      config.surrogate.weight_mode,
                                      config.surrogate.sample_fraction, rng);
          }
          loss = -HybridObjective(y, scores, config.surrogate, weights,
                                  neighborhoods);
        }
        tape.Backward(loss);
        days[d].loss = loss.value().item();
        for (const Var& v : vars.vars) days[d].grads.push_back(tape.Grad(v));
      });

      std::vector<Tensor> grads;
      for (const NamedTensor& t : state.params.tensors()) {
        grads.emplace_back(t.value.shape());
      }
      for (std::size_t d = 0; d < count; ++d) {
        if (!std::isfinite(days[d].loss)) {
          throw NumericalError("training diverged: non-finite loss in epoch " +
                               std::to_string(epoch));
        }
        epoch_loss += days[d].loss;
        for (std::size_t p = 0; p < grads.size(); ++p) {
          auto acc = grads[p].values();
          const auto g = days[d].grads[p].values();
          for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += g[k];
        }
      }
      std::vector<Tensor*> targets;
      for (std::size_t p = 0; p < grads.size(); ++p) {
        for (double& g : grads[p].values()) g /= static_cast<double>(count);
        if (!AllFinite(grads[p])) {
          throw NumericalError("training diverged: non-finite gradient for " +
                               state.params.tensors()[p].name + " in epoch " +
                               std::to_string(epoch));
        }
        targets.push_back(&state.params.tensors()[p].value);
      }
      state.adam.Step(targets, grads, lr);
    }

    if (!warmup && config.importance) {
      const Predictions train_pred = PredictWindows(
          state.params, grid, a_static, train_windows, config.threads);
      std::vector<std::vector<double>> predicted;
      for (const DayScores& d : train_pred) predicted.push_back(d.scores);
      const std::vector<double> e = ImportanceScores(train_truth, predicted);
      state.importance = NormalizeImportance(
          GaussianSmooth(e, config.lambda, grid.dims()), epoch, config.lambda);
    }

    const Predictions val_pred = PredictWindows(state.params, grid, a_static,
                                                val_windows, config.threads);
    const RankingReport report = MetricReport(
        grid, val_pred, std::vector<std::size_t>{config.eval_k},
        config.surrogate.radius);
    EpochLog entry;
    entry.epoch = epoch;
    entry.warmup = warmup;
    entry.train_obj = epoch_loss / static_cast<double>(order.size());
    entry.val_ndcg = report.Find("ndcg", config.eval_k)->mean;
    entry.val_lndcg = report.Find("lndcg", config.eval_k)->mean;
    entry.val_prec = report.Find("prec", config.eval_k)->mean;
    entry.wall_time_s = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    state.log.push_back(entry);
    state.epoch = epoch;

    if (entry.val_ndcg > state.best_val) {
      state.best_val = entry.val_ndcg;
      state.best = state.params;
      state.best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (hooks.on_epoch) hooks.on_epoch(state);
    if (config.patience > 0 && since_best >= config.patience) break;
  }
  return state;
}

}  // namespace georank

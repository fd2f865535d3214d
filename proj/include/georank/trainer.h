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

#ifndef GEORANK_TRAINER_H_
#define GEORANK_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "georank/autodiff.h"
#include "georank/importance.h"
#include "georank/model.h"
#include "georank/rank_losses.h"
#include "georank/rank_metrics.h"
#include "georank/st_data.h"
#include "nlohmann/json.hpp"

namespace georank {

enum class WarmupMode { kMse, kBce };

std::string WarmupModeName(WarmupMode mode);
WarmupMode ParseWarmupMode(const std::string& name);

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t warmup_epochs = 20;
  double lr_warmup = 1e-3;
  double lr_main = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t batch_size = 64;  // target days per Adam step
  SurrogateConfig surrogate;
  double lambda = 1.0;  // Gaussian smoothing scale, cells
  // When false P stays uniform and every positive gets weight 1.
  bool importance = true;
  WarmupMode warmup_mode = WarmupMode::kMse;
  std::size_t eval_k = 10;
  std::size_t patience = 0;  // epochs without improvement; 0 disables
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void Validate() const;
};

nlohmann::json TrainConfigToJson(const TrainConfig& config);
TrainConfig TrainConfigFromJson(const nlohmann::json& j);
nlohmann::json SurrogateConfigToJson(const SurrogateConfig& config);
SurrogateConfig SurrogateConfigFromJson(const nlohmann::json& j);

class Adam {
 public:
  Adam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // One bias-corrected update. Moments are created on the first call.
  void Step(const std::vector<ad::Tensor*>& params,
            const std::vector<ad::Tensor>& grads, double lr);
  std::size_t steps() const { return steps_; }
  const std::vector<ad::Tensor>& first_moments() const { return m_; }
  const std::vector<ad::Tensor>& second_moments() const { return v_; }

 private:
  double beta1_, beta2_, eps_;
  std::size_t steps_ = 0;
  std::vector<ad::Tensor> m_, v_;
};

// kMse: mean (h - y)^2 over locations. kBce: mean cross-entropy (nats) of
// sigmoid(h) against 1[y > 0].
ad::Var WarmupLoss(std::span<const double> relevance, ad::Var scores,
                   WarmupMode mode);

struct EpochLog {
  std::size_t epoch = 0;
  double train_obj = 0.0;  // mean minimized loss over the epoch's days
  double val_ndcg = 0.0;
  double val_lndcg = 0.0;
  double val_prec = 0.0;
  double wall_time_s = 0.0;
  bool warmup = false;
};

struct TrainState {
  ModelParams params;  // after the last epoch
  ModelParams best;    // best validation NDCG@K (initial params if none)
  std::size_t best_epoch = 0;  // 0 = initial params
  double best_val = 0.0;
  Adam adam;
  std::size_t epoch = 0;
  ImportanceDist importance;
  std::vector<EpochLog> log;
};

struct TrainHooks {
  // Called after each epoch's importance update.
  std::function<void(const TrainState&)> on_epoch;
};

TrainState Train(const StGrid& grid, const Splits& splits,
                 const ModelConfig& model_config,
                 const TrainConfig& train_config,
                 const TrainHooks& hooks = {});

// CSV with a header; `include_time` false drops the wall_time_s column.
std::string TrainLogCsv(const std::vector<EpochLog>& log, std::size_t k,
                        bool include_time = true);

// Model scores for every window, without gradients.
Predictions PredictWindows(const ModelParams& params, const StGrid& grid,
                           const ad::Tensor& a_static,
                           std::span<const Window> windows,
                           std::size_t threads = 1);

// Per-location mean of y over the training periods.
std::vector<double> HistoricalAverage(const StGrid& grid, const Splits& splits);
Predictions ConstantPredictions(std::span<const double> scores,
                                std::span<const Window> windows);

}  // namespace georank

#endif  // GEORANK_TRAINER_H_

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

#ifndef GEORANK_MODEL_H_
#define GEORANK_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "georank/autodiff.h"
#include "georank/st_data.h"
#include "nlohmann/json.hpp"

namespace georank {

enum class BetaMode { kLearned, kFixed };

std::string BetaModeName(BetaMode mode);
BetaMode ParseBetaMode(const std::string& name);

struct ModelConfig {
  std::size_t hidden = 32;            // graph-conv width
  std::size_t recurrent_hidden = 32;  // LSTM state width
  std::size_t layers = 2;             // graph-conv layers
  std::size_t window = 7;             // input periods per forecast
  std::size_t embedding_dim = 16;     // d_e
  double alpha = 3.0;
  BetaMode beta_mode = BetaMode::kLearned;
  double fixed_beta = 0.5;
  std::uint64_t seed = 0;

  void Validate() const;
};

nlohmann::json ModelConfigToJson(const ModelConfig& config);
// Missing keys keep their defaults; unknown keys are a ConfigError.
ModelConfig ModelConfigFromJson(const nlohmann::json& j);

// Sizes taken from the data the model runs on.
struct ModelDims {
  std::size_t locations = 0;
  std::size_t temporal_features = 0;
  std::size_t spatial_features = 0;
  std::size_t spatiotemporal_features = 0;

  static ModelDims FromGrid(const StGrid& grid);
  bool operator==(const ModelDims&) const = default;
};

struct NamedTensor {
  std::string name;
  ad::Tensor value;
};

class ModelParams {
 public:
  // Deterministic in config.seed. Weights ~ U[-k, k], k = sqrt(1/fan_in);
  // node embeddings ~ 0.1 N(0, 1).
  static ModelParams Init(const ModelConfig& config, const ModelDims& dims);

  // Checks names and shapes against the layout Init produces.
  ModelParams(ModelConfig config, ModelDims dims,
              std::vector<NamedTensor> tensors);

  const ModelConfig& config() const { return config_; }
  const ModelDims& dims() const { return dims_; }
  std::vector<NamedTensor>& tensors() { return tensors_; }
  const std::vector<NamedTensor>& tensors() const { return tensors_; }
  const ad::Tensor& Get(const std::string& name) const;
  ad::Tensor& Get(const std::string& name);
  std::size_t NumScalars() const;

  bool operator==(const ModelParams& other) const;

 private:
  ModelConfig config_;
  ModelDims dims_;
  std::vector<NamedTensor> tensors_;
};

// Expected (name, shape) layout for a config.
std::vector<std::pair<std::string, ad::Shape>> ParamLayout(
    const ModelConfig& config, const ModelDims& dims);

// Parameters placed on a tape, in ModelParams::tensors() order.
struct ModelVars {
  std::vector<ad::Var> vars;
  std::vector<std::string> names;

  ad::Var Get(const std::string& name) const;
};

ModelVars BindParams(ad::Tape& tape, const ModelParams& params,
                     bool requires_grad);

// Degree floor for the propagation matrix D^-1 (A + I), D = |row sum|.
inline constexpr double kDegreeFloor = 1e-6;

// Row-normalized propagation matrix for a (possibly signed) adjacency.
ad::Var NormalizedPropagation(ad::Var adjacency);

// Scores for window.target as an S x 1 Var. `a_static` is the S x S Pearson
// adjacency from the training periods.
ad::Var Forward(const ModelVars& vars, const ModelConfig& config,
                const StGrid& grid, const ad::Tensor& a_static,
                const Window& window);

// Forward without gradient tracking.
std::vector<double> PredictScores(const ModelParams& params,
                                  const StGrid& grid,
                                  const ad::Tensor& a_static,
                                  const Window& window);

// K best (location, score) pairs, descending, ties by ascending location.
std::vector<std::pair<std::size_t, double>> TopK(
    std::span<const double> scores, std::size_t k);

struct Checkpoint {
  ModelParams params;
  std::size_t train_end = 0;
};

// Writes <path> (JSON manifest) and <path>.bin (little-endian float64).
void SaveCheckpoint(const ModelParams& params, std::size_t train_end,
                    const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace georank

#endif  // GEORANK_MODEL_H_

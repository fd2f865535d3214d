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

#ifndef GEORANK_RUN_CONFIG_H_
#define GEORANK_RUN_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "georank/crossk.h"
#include "georank/model.h"
#include "georank/st_data.h"
#include "georank/trainer.h"
#include "nlohmann/json.hpp"

namespace georank {

struct DataConfig {
  std::string manifest;  // empty: generate from `synthetic`
  double train_fraction = kDefaultTrainFraction;
  SyntheticOptions synthetic;
};

struct CrossKConfig {
  std::size_t k = 10;
  double max_distance = 6.0;
  double step = 0.5;
  std::size_t simulations = 999;
  std::string envelope = "minmax";  // or "quantile"
  std::uint64_t seed = 0;
};

struct EvalConfig {
  std::vector<std::size_t> ks = {5, 10, 20};
  double radius = 2.0;
  CrossKConfig crossk;
};

struct RunConfig {
  DataConfig data;
  ModelConfig model;
  TrainConfig train;
  EvalConfig eval;
  std::string output_dir = "run";

  void Validate() const;
};

nlohmann::json RunConfigToJson(const RunConfig& config);
// Missing keys keep defaults; unknown keys and bad values are ConfigErrors.
RunConfig RunConfigFromJson(const nlohmann::json& j);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// 64-bit FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string ConfigHash(const RunConfig& config);

EnvelopeOptions ToEnvelopeOptions(const CrossKConfig& config,
                                  std::size_t threads);

}  // namespace georank

#endif  // GEORANK_RUN_CONFIG_H_

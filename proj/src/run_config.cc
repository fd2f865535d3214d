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

#include "georank/run_config.h"

#include <cstdio>

#include "georank/errors.h"
#include "georank/io_util.h"
#include "georank/json_util.h"

namespace georank {

using nlohmann::json;

namespace {

json SyntheticToJson(const SyntheticOptions& s) {
  return json{{"seed", s.seed},         {"rows", s.rows},
              {"cols", s.cols},         {"periods", s.periods},
              {"hotspots", s.hotspots}, {"intensity", s.intensity}};
}

SyntheticOptions SyntheticFromJson(const json& j) {
  constexpr std::string_view kWhere = "data.synthetic";
  RejectUnknownKeys(
      j, {"seed", "rows", "cols", "periods", "hotspots", "intensity"}, kWhere);
  SyntheticOptions s;
  ReadOptional(j, "seed", s.seed, kWhere);
  ReadOptional(j, "rows", s.rows, kWhere);
  ReadOptional(j, "cols", s.cols, kWhere);
  ReadOptional(j, "periods", s.periods, kWhere);
  ReadOptional(j, "hotspots", s.hotspots, kWhere);
  ReadOptional(j, "intensity", s.intensity, kWhere);
  return s;
}

json CrossKToJson(const CrossKConfig& c) {
  return json{{"k", c.k},
              {"max_distance", c.max_distance},
              {"step", c.step},
              {"simulations", c.simulations},
              {"envelope", c.envelope},
              {"seed", c.seed}};
}

CrossKConfig CrossKFromJson(const json& j) {
  constexpr std::string_view kWhere = "eval.crossk";
  RejectUnknownKeys(
      j, {"k", "max_distance", "step", "simulations", "envelope", "seed"},
      kWhere);
  CrossKConfig c;
  ReadOptional(j, "k", c.k, kWhere);
  ReadOptional(j, "max_distance", c.max_distance, kWhere);
  ReadOptional(j, "step", c.step, kWhere);
  ReadOptional(j, "simulations", c.simulations, kWhere);
  ReadOptional(j, "envelope", c.envelope, kWhere);
  ReadOptional(j, "seed", c.seed, kWhere);
  return c;
}

}  // namespace

void RunConfig::Validate() const {
  model.Validate();
  train.Validate();
  if (!(data.train_fraction > 0.0 && data.train_fraction < 1.0)) {
    throw ConfigError("data.train_fraction must lie in (0, 1)");
  }
  if (eval.ks.empty()) throw ConfigError("eval.ks must not be empty");
  for (std::size_t k : eval.ks) {
    if (k == 0) throw ConfigError("eval.ks entries must be >= 1");
  }
  if (!(eval.radius >= 0.0)) throw ConfigError("eval.radius must be >= 0");
  if (eval.crossk.k == 0) throw ConfigError("eval.crossk.k must be >= 1");
  if (eval.crossk.simulations == 0) {
    throw ConfigError("eval.crossk.simulations must be >= 1");
  }
  if (!(eval.crossk.step > 0.0) || !(eval.crossk.max_distance >= 0.0)) {
    throw ConfigError("eval.crossk needs step > 0 and max_distance >= 0");
  }
  if (eval.crossk.envelope != "minmax" && eval.crossk.envelope != "quantile") {
    throw ConfigError("eval.crossk.envelope must be 'minmax' or 'quantile'");
  }
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

json RunConfigToJson(const RunConfig& c) {
  return json{
      {"data",
       {{"manifest", c.data.manifest},
        {"train_fraction", c.data.train_fraction},
        {"synthetic", SyntheticToJson(c.data.synthetic)}}},
      {"model", ModelConfigToJson(c.model)},
      {"train", TrainConfigToJson(c.train)},
      {"eval",
       {{"ks", c.eval.ks},
        {"radius", c.eval.radius},
        {"crossk", CrossKToJson(c.eval.crossk)}}},
      {"output_dir", c.output_dir}};
}

RunConfig RunConfigFromJson(const json& j) {
  RejectUnknownKeys(j, {"data", "model", "train", "eval", "output_dir"},
                    "config");
  RunConfig c;
  if (const auto it = j.find("data"); it != j.end()) {
    RejectUnknownKeys(*it, {"manifest", "train_fraction", "synthetic"},
                      "data");
    ReadOptional(*it, "manifest", c.data.manifest, "data");
    ReadOptional(*it, "train_fraction", c.data.train_fraction, "data");
    if (it->contains("synthetic")) {
      c.data.synthetic = SyntheticFromJson(it->at("synthetic"));
    }
  }
  if (j.contains("model")) c.model = ModelConfigFromJson(j.at("model"));
  if (j.contains("train")) c.train = TrainConfigFromJson(j.at("train"));
  if (const auto it = j.find("eval"); it != j.end()) {
    RejectUnknownKeys(*it, {"ks", "radius", "crossk"}, "eval");
    ReadOptional(*it, "ks", c.eval.ks, "eval");
    ReadOptional(*it, "radius", c.eval.radius, "eval");
    if (it->contains("crossk")) c.eval.crossk = CrossKFromJson(it->at("crossk"));
  }
  ReadOptional(j, "output_dir", c.output_dir, "config");
  c.data.synthetic.train_fraction = c.data.train_fraction;
  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadTextFile(path);
  } catch (const Error& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " +
                      e.what());
  }
  return RunConfigFromJson(j);
}

std::string ConfigHash(const RunConfig& config) {
  const std::string text = RunConfigToJson(config).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

EnvelopeOptions ToEnvelopeOptions(const CrossKConfig& config,
                                  std::size_t threads) {
  EnvelopeOptions o;
  o.simulations = config.simulations;
  o.seed = config.seed;
  o.kind = config.envelope == "quantile" ? EnvelopeKind::kQuantile
                                         : EnvelopeKind::kMinMax;
  o.threads = threads;
  return o;
}

}  // namespace georank

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

#include "georank/model.h"

#include <bit>
#include <cmath>
#include <fstream>

#include "georank/adjacency.h"
#include "georank/errors.h"
#include "georank/io_util.h"
#include "georank/json_util.h"
#include "georank/rank_metrics.h"
#include "georank/rng.h"

namespace georank {

using ad::Shape;
using ad::Tensor;
using ad::Var;
using nlohmann::json;

std::string BetaModeName(BetaMode mode) {
  return mode == BetaMode::kLearned ? "learned" : "fixed";
}

BetaMode ParseBetaMode(const std::string& name) {
  if (name == "learned") return BetaMode::kLearned;
  if (name == "fixed") return BetaMode::kFixed;
  throw ConfigError("unknown beta mode '" + name + "'");
}

void ModelConfig::Validate() const {
  if (hidden == 0 || recurrent_hidden == 0 || layers == 0 ||
      embedding_dim == 0) {
    throw ConfigError("model sizes must be positive");
  }
  if (window == 0) throw ConfigError("window must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("alpha must be a positive finite number");
  }
  if (!(fixed_beta >= 0.0 && fixed_beta <= 1.0)) {
    throw ConfigError("fixed_beta must lie in [0, 1]");
  }
}

json ModelConfigToJson(const ModelConfig& c) {
  return json{{"hidden", c.hidden},
              {"recurrent_hidden", c.recurrent_hidden},
              {"layers", c.layers},
              {"window", c.window},
              {"embedding_dim", c.embedding_dim},
              {"alpha", c.alpha},
              {"beta_mode", BetaModeName(c.beta_mode)},
              {"fixed_beta", c.fixed_beta},
              {"seed", c.seed}};
}

ModelConfig ModelConfigFromJson(const json& j) {
  constexpr std::string_view kWhere = "model";
  RejectUnknownKeys(j,
                    {"hidden", "recurrent_hidden", "layers", "window",
                     "embedding_dim", "alpha", "beta_mode", "fixed_beta",
                     "seed"},
                    kWhere);
  ModelConfig c;
  ReadOptional(j, "hidden", c.hidden, kWhere);
  ReadOptional(j, "recurrent_hidden", c.recurrent_hidden, kWhere);
  ReadOptional(j, "layers", c.layers, kWhere);
  ReadOptional(j, "window", c.window, kWhere);
  ReadOptional(j, "embedding_dim", c.embedding_dim, kWhere);
  ReadOptional(j, "alpha", c.alpha, kWhere);
  std::string beta = BetaModeName(c.beta_mode);
  ReadOptional(j, "beta_mode", beta, kWhere);
  c.beta_mode = ParseBetaMode(beta);
  ReadOptional(j, "fixed_beta", c.fixed_beta, kWhere);
  ReadOptional(j, "seed", c.seed, kWhere);
  c.Validate();
  return c;
}

ModelDims ModelDims::FromGrid(const StGrid& grid) {
  return ModelDims{grid.locations(), grid.temporal_features(),
                   grid.spatial_features(), grid.spatiotemporal_features()};
}

std::vector<std::pair<std::string, Shape>> ParamLayout(const ModelConfig& c,
                                                       const ModelDims& d) {
  const std::size_t de = c.embedding_dim;
  std::vector<std::pair<std::string, Shape>> layout = {
      {"adj.e1", {d.locations, de}},
      {"adj.e2", {d.locations, de}},
      {"adj.w1", {de, de}},
      {"adj.w2", {de, de}},
      {"adj.w3", {d.temporal_features, 1}},
      {"adj.proj", {d.spatiotemporal_features, de}},
  };
  std::size_t in = d.spatial_features + d.spatiotemporal_features;
  for (std::size_t l = 0; l < c.layers; ++l) {
    layout.push_back({"gc" + std::to_string(l) + ".w", {in, c.hidden}});
    in = c.hidden;
  }
  const std::size_t hr = c.recurrent_hidden;
  layout.push_back({"lstm.wx", {c.hidden + d.temporal_features, 4 * hr}});
  layout.push_back({"lstm.wh", {hr, 4 * hr}});
  layout.push_back({"lstm.b", {1, 4 * hr}});
  layout.push_back({"head.w", {hr, 1}});
  layout.push_back({"head.b", {1, 1}});
  return layout;
}

ModelParams ModelParams::Init(const ModelConfig& config, const ModelDims& dims) {
  config.Validate();
  Rng rng(config.seed);
  std::vector<NamedTensor> tensors;
  for (auto& [name, shape] : ParamLayout(config, dims)) {
    Tensor t(shape);
    if (name == "adj.e1" || name == "adj.e2") {
      for (double& v : t.values()) v = 0.1 * rng.Normal();
    } else {
      // Biases take the fan-in of the weight they accompany.
      std::size_t fan_in = shape[0];
      if (name == "lstm.b") fan_in = config.recurrent_hidden;
      if (name == "head.b") fan_in = config.recurrent_hidden;
      const double k = std::sqrt(1.0 / static_cast<double>(std::max<std::size_t>(fan_in, 1)));
      for (double& v : t.values()) v = rng.Uniform(-k, k);
    }
    tensors.push_back({name, std::move(t)});
  }
  return ModelParams(config, dims, std::move(tensors));
}

ModelParams::ModelParams(ModelConfig config, ModelDims dims,
                         std::vector<NamedTensor> tensors)
    : config_(config), dims_(dims), tensors_(std::move(tensors)) {
  config_.Validate();
  const auto layout = ParamLayout(config_, dims_);
  if (layout.size() != tensors_.size()) {
    throw ShapeError("model parameters: expected " +
                     std::to_string(layout.size()) + " tensors, got " +
                     std::to_string(tensors_.size()));
  }
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (tensors_[i].name != layout[i].first) {
      throw ShapeError("model parameters: expected '" + layout[i].first +
                       "' at position " + std::to_string(i) + ", got '" +
                       tensors_[i].name + "'");
    }
    if (tensors_[i].value.shape() != layout[i].second) {
      throw ShapeError("model parameter '" + layout[i].first + "': shape " +
                       ad::ShapeToString(tensors_[i].value.shape()) +
                       " vs expected " + ad::ShapeToString(layout[i].second));
    }
    for (double v : tensors_[i].value.values()) {
      if (!std::isfinite(v)) {
        throw NumericalError("model parameter '" + layout[i].first +
                             "' holds a non-finite value");
      }
    }
  }
}

const Tensor& ModelParams::Get(const std::string& name) const {
  for (const NamedTensor& t : tensors_) {
    if (t.name == name) return t.value;
  }
  throw ConfigError("no model parameter named '" + name + "'");
}

Tensor& ModelParams::Get(const std::string& name) {
  return const_cast<Tensor&>(std::as_const(*this).Get(name));
}

std::size_t ModelParams::NumScalars() const {
  std::size_t n = 0;
  for (const NamedTensor& t : tensors_) n += t.value.size();
  return n;
}

bool ModelParams::operator==(const ModelParams& other) const {
  if (!(dims_ == other.dims_) ||
      ModelConfigToJson(config_) != ModelConfigToJson(other.config_) ||
      tensors_.size() != other.tensors_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].name != other.tensors_[i].name ||
        !(tensors_[i].value == other.tensors_[i].value)) {
      return false;
    }
  }
  return true;
}

Var ModelVars::Get(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return vars[i];
  }
  throw ConfigError("no model parameter named '" + name + "'");
}

ModelVars BindParams(ad::Tape& tape, const ModelParams& params,
                     bool requires_grad) {
  ModelVars out;
  for (const NamedTensor& t : params.tensors()) {
    out.vars.push_back(tape.Leaf(t.value, requires_grad));
    out.names.push_back(t.name);
  }
  return out;
}

Var NormalizedPropagation(Var adjacency) {
  const std::size_t S = adjacency.shape().at(0);
  const Var with_self =
      adjacency + adjacency.tape()->Constant(Tensor::Identity(S));
  const Var degree = ad::SumAxis(with_self, 1);
  for (double v : degree.value().values()) {
    if (!std::isfinite(v)) {
      throw NumericalError("adjacency has a non-finite row sum");
    }
  }
  const Var floored = ad::ClampMin(ad::Abs(degree), kDegreeFloor);
  return ad::Div(with_self, ad::Broadcast(floored, Shape{S, S}));
}

namespace {

Tensor TemporalRow(const StGrid& grid, std::size_t t) {
  const auto f = grid.TemporalAt(t);
  return Tensor(Shape{1, f.size()}, std::vector<double>(f.begin(), f.end()));
}

}  // namespace

Var Forward(const ModelVars& vars, const ModelConfig& config,
            const StGrid& grid, const Tensor& a_static, const Window& window) {
  const std::size_t S = grid.locations();
  if (window.length == 0 || window.first_input + window.length > window.target ||
      window.target >= grid.periods()) {
    throw ConfigError("Forward: window does not fit the grid");
  }
  if (a_static.shape() != Shape{S, S}) {
    throw ShapeError("Forward: static adjacency " +
                     ad::ShapeToString(a_static.shape()) + " vs grid with " +
                     std::to_string(S) + " locations");
  }
  ad::Tape& tape = *vars.vars.front().tape();
  const std::size_t d_t = grid.temporal_features();
  const std::size_t d_st = grid.spatiotemporal_features();
  const std::size_t hr = config.recurrent_hidden;

  const auto fs = grid.spatial_data();
  const Var f_s = tape.Constant(Tensor(
      Shape{S, grid.spatial_features()}, std::vector<double>(fs.begin(), fs.end())));
  const Var a_s = tape.Constant(a_static);

  DynamicAdjacencyParams adj{vars.Get("adj.e1"), vars.Get("adj.e2"),
                             vars.Get("adj.w1"), vars.Get("adj.w2"),
                             vars.Get("adj.w3"), vars.Get("adj.proj"),
                             config.alpha};
  std::vector<Var> gc;
  for (std::size_t l = 0; l < config.layers; ++l) {
    gc.push_back(vars.Get("gc" + std::to_string(l) + ".w"));
  }
  const Var wx = vars.Get("lstm.wx");
  const Var wh = vars.Get("lstm.wh");
  const Var bias = ad::Broadcast(vars.Get("lstm.b"), Shape{S, 4 * hr});

  Var h = tape.Constant(Tensor(Shape{S, hr}));
  Var c = tape.Constant(Tensor(Shape{S, hr}));
  for (std::size_t t = window.first_input;
       t < window.first_input + window.length; ++t) {
    const auto fst = grid.SpatiotemporalAt(t);
    const Var f_st = tape.Constant(
        Tensor(Shape{S, d_st}, std::vector<double>(fst.begin(), fst.end())));
    const Var f_t = tape.Constant(TemporalRow(grid, t));

    const Var a_dyn = DynamicAdjacency(adj, f_st);
    const Var a = config.beta_mode == BetaMode::kLearned
                      ? Blend(a_dyn, a_s, BlendWeight(f_t, adj.w3))
                      : Blend(a_dyn, a_s, config.fixed_beta);
    const Var prop = NormalizedPropagation(a);

    Var x = ad::Concat({f_s, f_st}, 1);
    for (const Var& w : gc) x = ad::Relu(ad::MatMul(prop, ad::MatMul(x, w)));

    const Var input = ad::Concat({x, ad::Broadcast(f_t, Shape{S, d_t})}, 1);
    const Var gates =
        ad::MatMul(input, wx) + ad::MatMul(h, wh) + bias;
    const Var in_gate = ad::Sigmoid(ad::Slice(gates, 1, 0, hr));
    const Var forget_gate = ad::Sigmoid(ad::Slice(gates, 1, hr, 2 * hr));
    const Var out_gate = ad::Sigmoid(ad::Slice(gates, 1, 2 * hr, 3 * hr));
    const Var candidate = ad::Tanh(ad::Slice(gates, 1, 3 * hr, 4 * hr));
    c = ad::Mul(forget_gate, c) + ad::Mul(in_gate, candidate);
    h = ad::Mul(out_gate, ad::Tanh(c));
  }
  return ad::MatMul(h, vars.Get("head.w")) +
         ad::Broadcast(vars.Get("head.b"), Shape{S, 1});
}

std::vector<double> PredictScores(const ModelParams& params,
                                  const StGrid& grid, const Tensor& a_static,
                                  const Window& window) {
  if (!(ModelDims::FromGrid(grid) == params.dims())) {
    throw ShapeError("model was built for a grid of a different shape");
  }
  ad::Tape tape;
  const ModelVars vars = BindParams(tape, params, /*requires_grad=*/false);
  const Var scores = Forward(vars, params.config(), grid, a_static, window);
  const auto v = scores.value().values();
  return std::vector<double>(v.begin(), v.end());
}

std::vector<std::pair<std::size_t, double>> TopK(std::span<const double> scores,
                                                 std::size_t k) {
  if (k == 0 || k > scores.size()) {
    throw ConfigError("top-K: K=" + std::to_string(k) + " outside [1, " +
                      std::to_string(scores.size()) + "]");
  }
  const std::vector<std::size_t> order = RankOrder(scores);
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t i = 0; i < k; ++i) out.emplace_back(order[i], scores[order[i]]);
  return out;
}

namespace {

constexpr const char* kCheckpointFormat = "georank-model";

std::filesystem::path DataPath(const std::filesystem::path& manifest) {
  std::filesystem::path p = manifest;
  p += ".bin";
  return p;
}

}  // namespace

void SaveCheckpoint(const ModelParams& params, std::size_t train_end,
                    const std::filesystem::path& path) {
  json tensors = json::array();
  std::string bytes;
  std::size_t offset = 0;
  for (const NamedTensor& t : params.tensors()) {
    tensors.push_back({{"name", t.name},
                       {"shape", t.value.shape()},
                       {"offset", offset}});
    for (double v : t.value.values()) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      for (int b = 0; b < 8; ++b) {
        bytes.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
      }
    }
    offset += t.value.size();
  }
  const ModelDims& d = params.dims();
  const json manifest = {
      {"format", kCheckpointFormat},
      {"version", 1},
      {"config", ModelConfigToJson(params.config())},
      {"dims",
       {{"S", d.locations},
        {"d_t", d.temporal_features},
        {"d_s", d.spatial_features},
        {"d_st", d.spatiotemporal_features}}},
      {"train_end", train_end},
      {"data", DataPath(path).filename().string()},
      {"tensors", tensors}};
  WriteTextFile(DataPath(path), bytes);
  WriteTextFile(path, manifest.dump(2) + "\n");
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  json manifest;
  try {
    manifest = json::parse(ReadTextFile(path));
    if (manifest.at("format") != kCheckpointFormat ||
        manifest.at("version") != 1) {
      throw DataError("unsupported checkpoint format in " + path.string());
    }
    const ModelConfig config = ModelConfigFromJson(manifest.at("config"));
    const json& dj = manifest.at("dims");
    const ModelDims dims{dj.at("S").get<std::size_t>(),
                         dj.at("d_t").get<std::size_t>(),
                         dj.at("d_s").get<std::size_t>(),
                         dj.at("d_st").get<std::size_t>()};
    const std::string bytes =
        ReadTextFile(path.parent_path() /
                     manifest.at("data").get<std::string>());
    std::vector<NamedTensor> tensors;
    for (const json& tj : manifest.at("tensors")) {
      const Shape shape = tj.at("shape").get<Shape>();
      const std::size_t offset = tj.at("offset").get<std::size_t>();
      const std::size_t n = ad::NumElements(shape);
      if ((offset + n) * 8 > bytes.size()) {
        throw DataError("checkpoint data file is truncated");
      }
      std::vector<double> values(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) {
          bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(
                      bytes[(offset + i) * 8 + b]))
                  << (8 * b);
        }
        values[i] = std::bit_cast<double>(bits);
      }
      tensors.push_back({tj.at("name").get<std::string>(),
                         Tensor(shape, std::move(values))});
    }
    return Checkpoint{ModelParams(config, dims, std::move(tensors)),
                      manifest.at("train_end").get<std::size_t>()};
  } catch (const json::exception& e) {
    throw DataError("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace georank

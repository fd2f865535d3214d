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

#include "georank/grad_suite.h"

#include <algorithm>

#include "georank/adjacency.h"
#include "georank/errors.h"
#include "georank/model.h"
#include "georank/rank_losses.h"
#include "georank/rng.h"
#include "georank/st_data.h"

namespace georank {

using ad::Shape;
using ad::Tensor;
using ad::Var;

std::vector<GradSuiteResult> RunGradientSuite(const GradSuiteOptions& o) {
  SyntheticOptions synth;
  synth.seed = o.seed;
  synth.rows = o.rows;
  synth.cols = o.cols;
  synth.periods = o.periods;
  synth.hotspots = 1;
  const StGrid grid = GenerateSyntheticDataset(synth).grid;
  const Splits splits = ChronologicalSplit(grid.periods());
  const std::vector<Window> windows = TrainWindows(grid, o.window, splits);
  if (windows.empty()) throw ConfigError("gradient suite: no training window");
  const std::size_t S = grid.locations();

  // Pick the training day with the most events so the ranking terms are
  // non-trivial.
  Window window = windows.front();
  std::size_t best = 0;
  for (const Window& w : windows) {
    const std::size_t n = PositiveSet(grid.RiskAt(w.target)).size();
    if (n > best) {
      best = n;
      window = w;
    }
  }
  const auto y_span = grid.RiskAt(window.target);
  const std::vector<double> y(y_span.begin(), y_span.end());
  const std::vector<double> weights(PositiveSet(y).size(), 1.0);
  SurrogateConfig surrogate;
  surrogate.sigma = 0.1;
  const NeighborhoodTable neighborhoods(grid.dims(), surrogate.radius);

  std::vector<GradSuiteResult> results;

  // The objective has only S inputs; repeat over fresh score draws and merge.
  Rng rng(DeriveSeed(o.seed, 17));
  ad::GradCheckOptions check = o.check;
  GradSuiteResult hybrid{"hybrid_loss", {}};
  hybrid.report.passed = true;
  const std::size_t draws = (o.coordinates + S - 1) / S;
  for (std::size_t i = 0; i < draws; ++i) {
    Tensor scores(Shape{S, 1});
    for (double& v : scores.values()) v = rng.Normal();
    const ad::GradCheckReport r = ad::GradCheck(
        [&](ad::Tape&, std::span<const Var> p) {
          return -HybridObjective(y, p[0], surrogate, weights, neighborhoods);
        },
        {scores}, check);
    hybrid.report.coordinates.insert(hybrid.report.coordinates.end(),
                                     r.coordinates.begin(),
                                     r.coordinates.end());
    hybrid.report.max_relative_error =
        std::max(hybrid.report.max_relative_error, r.max_relative_error);
    hybrid.report.checked += r.checked;
    hybrid.report.excluded += r.excluded;
    hybrid.report.passed = hybrid.report.passed && r.passed;
  }
  results.push_back(std::move(hybrid));

  ModelConfig config;
  config.window = o.window;
  config.seed = o.seed;
  const ModelParams params = ModelParams::Init(config, ModelDims::FromGrid(grid));
  const Tensor a_static = PearsonStatic(grid, splits.train_end);
  std::vector<Tensor> values;
  std::vector<std::string> names;
  for (const NamedTensor& t : params.tensors()) {
    values.push_back(t.value);
    names.push_back(t.name);
  }
  auto bind = [&](std::span<const Var> p) {
    ModelVars vars;
    vars.vars.assign(p.begin(), p.end());
    vars.names = names;
    return vars;
  };
  check.max_coordinates = o.coordinates;
  check.seed = DeriveSeed(o.seed, 2);
  results.push_back(
      {"model_mean_score",
       ad::GradCheck(
           [&](ad::Tape&, std::span<const Var> p) {
             return ad::Mean(Forward(bind(p), config, grid, a_static, window));
           },
           values, check)});
  check.seed = DeriveSeed(o.seed, 3);
  results.push_back(
      {"model_hybrid",
       ad::GradCheck(
           [&](ad::Tape&, std::span<const Var> p) {
             const Var h = Forward(bind(p), config, grid, a_static, window);
             return -HybridObjective(y, h, surrogate, weights, neighborhoods);
           },
           values, check)});
  return results;
}

}  // namespace georank

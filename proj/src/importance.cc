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

#include "georank/importance.h"

#include <cmath>
#include <numbers>
#include <string>

#include "georank/errors.h"
#include "georank/io_util.h"
#include "georank/rank_metrics.h"

namespace georank {

ImportanceDist ImportanceDist::Uniform(std::size_t locations, double lambda) {
  if (locations == 0) throw ConfigError("importance over zero locations");
  return ImportanceDist{
      std::vector<double>(locations, 1.0 / static_cast<double>(locations)), 0,
      lambda};
}

std::vector<double> ImportanceScores(
    const std::vector<std::vector<double>>& truth,
    const std::vector<std::vector<double>>& predicted) {
  if (truth.size() != predicted.size() || truth.empty()) {
    throw ShapeError("importance scores: " + std::to_string(truth.size()) +
                     " true days vs " + std::to_string(predicted.size()) +
                     " predicted days");
  }
  const std::size_t S = truth.front().size();
  std::vector<double> out(S, 0.0);
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (truth[t].size() != S || predicted[t].size() != S) {
      throw ShapeError("importance scores: day " + std::to_string(t) +
                       " has the wrong number of locations");
    }
    const std::vector<std::size_t> rank = Ranks(truth[t]);
    for (std::size_t s = 0; s < S; ++s) {
      const double err = std::abs(truth[t][s] - predicted[t][s]);
      out[s] += std::expm1(err * std::numbers::ln2) * Discount(rank[s]);
    }
  }
  for (double& e : out) e /= static_cast<double>(truth.size());
  return out;
}

std::vector<double> GaussianSmooth(std::span<const double> scores,
                                   double lambda, const GridDims& dims) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("Gaussian smoothing needs lambda > 0");
  }
  const std::size_t S = dims.locations();
  if (scores.size() != S) {
    throw ShapeError("Gaussian smoothing: " + std::to_string(scores.size()) +
                     " scores for " + std::to_string(S) + " locations");
  }
  const double norm = 1.0 / (2.0 * std::numbers::pi * lambda * lambda);
  const double inv = 1.0 / (2.0 * lambda * lambda);
  std::vector<double> out(S, 0.0);
  for (std::size_t u = 0; u < S; ++u) {
    const Cell cu = ToCell(dims, u);
    double acc = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      if (scores[s] == 0.0) continue;
      const Cell cs = ToCell(dims, s);
      const double dr = static_cast<double>(cu.row) - static_cast<double>(cs.row);
      const double dc = static_cast<double>(cu.col) - static_cast<double>(cs.col);
      acc += scores[s] * std::exp(-(dr * dr + dc * dc) * inv);
    }
    out[u] = norm * acc;
  }
  return out;
}

ImportanceDist NormalizeImportance(std::span<const double> smoothed,
                                   std::size_t epoch, double lambda) {
  if (smoothed.empty()) throw ConfigError("importance over zero locations");
  double total = 0.0;
  for (std::size_t s = 0; s < smoothed.size(); ++s) {
    if (!(smoothed[s] >= 0.0) || !std::isfinite(smoothed[s])) {
      throw NumericalError("importance score at location " +
                           std::to_string(s) + " is negative or non-finite");
    }
    total += smoothed[s];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    ImportanceDist d = ImportanceDist::Uniform(smoothed.size(), lambda);
    d.epoch = epoch;
    return d;
  }
  ImportanceDist d{std::vector<double>(smoothed.size()), epoch, lambda};
  for (std::size_t s = 0; s < smoothed.size(); ++s) {
    d.probabilities[s] = smoothed[s] / total;
  }
  return d;
}

void WriteImportanceCsv(const ImportanceDist& dist, const GridDims& dims,
                        const std::filesystem::path& path) {
  if (dist.probabilities.size() != dims.locations()) {
    throw ShapeError("importance distribution does not match the grid");
  }
  std::string out = "row,col,probability\n";
  for (std::size_t s = 0; s < dims.locations(); ++s) {
    const Cell c = ToCell(dims, s);
    out += std::to_string(c.row) + ',' + std::to_string(c.col) + ',' +
           FormatDouble(dist.probabilities[s]) + '\n';
  }
  WriteTextFile(path, out);
}

}  // namespace georank

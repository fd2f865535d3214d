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

#include "georank/rank_losses.h"

#include <algorithm>
#include <cmath>

#include "georank/errors.h"

namespace georank {
namespace {

using ad::Tensor;
using ad::Var;

// Score assigned to padding slots; far enough below any real score that the
// hinge term is exactly zero.
constexpr double kPadScore = -1e12;

double CappedGain(double y, const std::optional<double>& cap) {
  return Gain(cap ? std::min(y, *cap) : y);
}

double IdealDcgCapped(std::span<const double> relevance,
                      const std::optional<double>& cap) {
  std::vector<double> gains;
  gains.reserve(relevance.size());
  for (double y : relevance) gains.push_back(CappedGain(y, cap));
  std::sort(gains.begin(), gains.end(), std::greater<>());
  double dcg = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i) dcg += gains[i] * Discount(i + 1);
  return dcg;
}

void RequireColumn(Var scores) {
  const ad::Shape& shape = scores.shape();
  if (shape.size() != 2 || shape[1] != 1) {
    throw ShapeError("scores must be an S x 1 column, got " +
                     ad::ShapeToString(shape));
  }
}

Var Zero(Var like) { return like.tape()->Constant(Tensor::Scalar(0.0)); }

// Rows r = 0..R-1 each rank target[r] within the candidate list rows[r]
// (padded with `pad` indices). Returns R x 1 surrogate ranks.
Var PaddedSurrogateRanks(Var scores, std::span<const std::size_t> candidates,
                         std::size_t width,
                         std::span<const std::size_t> targets, double margin) {
  ad::Tape& tape = *scores.tape();
  const std::size_t S = scores.shape()[0];
  const std::size_t R = targets.size();
  const Var padded =
      ad::Concat({scores, tape.Constant(Tensor(ad::Shape{1, 1}, kPadScore))},
                 0);
  (void)S;
  const Var others = ad::Reshape(ad::Gather(padded, candidates),
                                 ad::Shape{R, width});
  const Var mine =
      ad::Broadcast(ad::Gather(scores, targets), ad::Shape{R, width});
  const Var hinge = ad::Relu(ad::AddScalar(others - mine, margin));
  return ad::SumAxis(ad::Square(hinge), 1);
}

}  // namespace

std::string WeightModeName(WeightMode mode) {
  return mode == WeightMode::kWeight ? "weight" : "sample";
}

WeightMode ParseWeightMode(const std::string& name) {
  if (name == "weight") return WeightMode::kWeight;
  if (name == "sample") return WeightMode::kSample;
  throw ConfigError("unknown weight mode '" + name + "'");
}

void SurrogateConfig::Validate() const {
  if (!(margin >= 0.0)) throw ConfigError("margin c must be >= 0");
  if (!(sigma >= 0.0 && sigma <= 1.0)) {
    throw ConfigError("sigma must lie in [0, 1]");
  }
  if (!(radius >= 0.0)) throw ConfigError("radius must be >= 0");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
    throw ConfigError("sample_fraction must lie in (0, 1]");
  }
  if (gain_cap && !(*gain_cap > 0.0)) {
    throw ConfigError("gain_cap must be positive");
  }
}

std::vector<std::size_t> PositiveSet(std::span<const double> relevance) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < relevance.size(); ++s) {
    if (relevance[s] > 0.0) out.push_back(s);
  }
  return out;
}

Var SurrogateRanks(Var scores, std::span<const std::size_t> set,
                   std::span<const std::size_t> targets, double margin) {
  RequireColumn(scores);
  std::vector<std::size_t> candidates;
  candidates.reserve(set.size() * targets.size());
  for (std::size_t r = 0; r < targets.size(); ++r) {
    candidates.insert(candidates.end(), set.begin(), set.end());
  }
  return PaddedSurrogateRanks(scores, candidates, set.size(), targets, margin);
}

Var SurrogateRank(Var scores, std::span<const std::size_t> set,
                  std::size_t location, double margin) {
  if (std::find(set.begin(), set.end(), location) == set.end()) {
    throw ConfigError("SurrogateRank: location " + std::to_string(location) +
                      " is not in the ranked set");
  }
  const std::size_t target[] = {location};
  return ad::Reshape(SurrogateRanks(scores, set, target, margin), ad::Shape{});
}

Var NdcgSurrogate(std::span<const double> relevance, Var scores,
                  std::span<const std::size_t> positives,
                  std::span<const double> weights, double margin,
                  std::optional<double> gain_cap) {
  RequireColumn(scores);
  if (scores.shape()[0] != relevance.size()) {
    throw ShapeError("NdcgSurrogate: scores and relevance differ in length");
  }
  if (weights.size() != positives.size()) {
    throw ShapeError("NdcgSurrogate: weights not aligned with positives");
  }
  const double ideal = IdealDcgCapped(relevance, gain_cap);
  std::vector<std::size_t> targets;
  std::vector<double> coef;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    if (weights[i] < 0.0) throw ConfigError("importance weights must be >= 0");
    if (weights[i] == 0.0) continue;
    targets.push_back(positives[i]);
    coef.push_back(weights[i] * CappedGain(relevance[positives[i]], gain_cap) /
                   ideal);
  }
  if (targets.empty() || ideal <= 0.0) return Zero(scores);

  std::vector<std::size_t> all(relevance.size());
  for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
  const Var ranks = SurrogateRanks(scores, all, targets, margin);
  const Var denom = ad::Log2(ad::AddScalar(ranks, 1.0));
  const Var numer = scores.tape()->Constant(
      Tensor(ad::Shape{targets.size(), 1}, std::move(coef)));
  return ad::Sum(ad::Div(numer, denom));
}

Var LocalNdcgSurrogate(std::span<const double> relevance, Var scores,
                       std::span<const std::size_t> positives,
                       std::span<const double> weights, double margin,
                       const NeighborhoodTable& neighborhoods,
                       std::optional<double> gain_cap) {
  RequireColumn(scores);
  const std::size_t S = relevance.size();
  if (scores.shape()[0] != S || neighborhoods.locations() != S) {
    throw ShapeError("LocalNdcgSurrogate: inputs differ in length");
  }
  if (weights.size() != positives.size()) {
    throw ShapeError("LocalNdcgSurrogate: weights not aligned with positives");
  }
  if (positives.empty()) return Zero(scores);

  std::size_t width = 0;
  for (std::size_t s : positives) {
    width = std::max(width, neighborhoods.Members(s).size());
  }
  std::vector<std::size_t> candidates, targets;
  std::vector<double> coef;
  const double share = 1.0 / static_cast<double>(positives.size());
  std::vector<double> local;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    if (weights[i] < 0.0) throw ConfigError("importance weights must be >= 0");
    if (weights[i] == 0.0) continue;
    const auto members = neighborhoods.Members(positives[i]);
    local.clear();
    for (std::size_t u : members) local.push_back(relevance[u]);
    const double ideal = IdealDcgCapped(local, gain_cap);
    if (ideal <= 0.0) continue;
    for (std::size_t u : members) {
      if (relevance[u] <= 0.0) continue;
      targets.push_back(u);
      coef.push_back(share * weights[i] * CappedGain(relevance[u], gain_cap) /
                     ideal);
      candidates.insert(candidates.end(), members.begin(), members.end());
      candidates.insert(candidates.end(), width - members.size(), S);
    }
  }
  if (targets.empty()) return Zero(scores);

  const Var ranks =
      PaddedSurrogateRanks(scores, candidates, width, targets, margin);
  const Var denom = ad::Log2(ad::AddScalar(ranks, 1.0));
  const Var numer = scores.tape()->Constant(
      Tensor(ad::Shape{targets.size(), 1}, std::move(coef)));
  return ad::Sum(ad::Div(numer, denom));
}

Var HybridObjective(std::span<const double> relevance, Var scores,
                    const SurrogateConfig& config,
                    std::span<const double> weights,
                    const NeighborhoodTable& neighborhoods) {
  const std::vector<std::size_t> positives = PositiveSet(relevance);
  if (config.sigma == 0.0) {
    return NdcgSurrogate(relevance, scores, positives, weights, config.margin,
                         config.gain_cap);
  }
  const Var local =
      LocalNdcgSurrogate(relevance, scores, positives, weights, config.margin,
                         neighborhoods, config.gain_cap);
  if (config.sigma == 1.0) return local;
  const Var global = NdcgSurrogate(relevance, scores, positives, weights,
                                   config.margin, config.gain_cap);
  return ad::Scale(global, 1.0 - config.sigma) +
         ad::Scale(local, config.sigma);
}

std::vector<double> ApplyImportance(std::span<const std::size_t> positives,
                                    std::span<const double> probabilities,
                                    WeightMode mode, double sample_fraction,
                                    Rng& rng) {
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw ConfigError("importance probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("importance probabilities sum to " +
                      std::to_string(total) + ", not 1");
  }
  double mass = 0.0;
  for (std::size_t s : positives) {
    if (s >= probabilities.size()) {
      throw ConfigError("positive location outside the importance vector");
    }
    mass += probabilities[s];
  }
  const std::size_t n = positives.size();
  std::vector<double> weights(n, 0.0);
  if (n == 0) return weights;

  if (mode == WeightMode::kWeight) {
    if (mass <= 0.0) {
      std::fill(weights.begin(), weights.end(), 1.0);
      return weights;
    }
    // Equal mass on S+ gives exactly 1, not 1 up to rounding.
    bool equal = true;
    for (std::size_t s : positives) {
      equal = equal && probabilities[s] == probabilities[positives.front()];
    }
    for (std::size_t i = 0; i < n; ++i) {
      weights[i] = equal ? 1.0
                         : probabilities[positives[i]] *
                               static_cast<double>(n) / mass;
    }
    return weights;
  }

  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
    throw ConfigError("sample_fraction must lie in (0, 1]");
  }
  const auto draws = static_cast<std::size_t>(
      std::ceil(sample_fraction * static_cast<double>(n) - 1e-12));
  std::vector<double> pool(n);
  for (std::size_t i = 0; i < n; ++i) {
    pool[i] = mass > 0.0 ? probabilities[positives[i]] : 1.0;
  }
  for (std::size_t d = 0; d < draws; ++d) {
    double remaining = 0.0;
    for (double p : pool) remaining += p;
    if (remaining <= 0.0) break;
    const double u = rng.Uniform() * remaining;
    double cumulative = 0.0;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (pool[i] <= 0.0) continue;
      pick = i;
      cumulative += pool[i];
      if (u < cumulative) break;
    }
    weights[pick] = 1.0;
    pool[pick] = 0.0;
  }
  return weights;
}

}  // namespace georank

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

#ifndef GEORANK_RANK_LOSSES_H_
#define GEORANK_RANK_LOSSES_H_

// Differentiable ranking objectives. Every function returns a value to be
// MAXIMIZED; the trainer negates it. Score vectors are S x 1 Vars.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "georank/autodiff.h"
#include "georank/rank_metrics.h"
#include "georank/rng.h"

namespace georank {

enum class WeightMode { kWeight, kSample };

std::string WeightModeName(WeightMode mode);
WeightMode ParseWeightMode(const std::string& name);

struct SurrogateConfig {
  double margin = 1.0;  // c in the squared hinge max(0, x + c)^2
  double sigma = 0.1;   // share of the local objective in the hybrid
  double radius = 2.0;  // neighborhood radius, cells
  WeightMode weight_mode = WeightMode::kSample;
  double sample_fraction = 0.5;
  // Caps relevance inside gains 2^y - 1; off by default.
  std::optional<double> gain_cap;

  void Validate() const;
};

// Locations with y > 0, ascending.
std::vector<std::size_t> PositiveSet(std::span<const double> relevance);

// Rank surrogate over the set Q:
//   g(s) = sum_{s' in Q} max(0, h(s') - h(s) + margin)^2,
// including the self term margin^2. Throws ConfigError when s is not in Q.
ad::Var SurrogateRank(ad::Var scores, std::span<const std::size_t> set,
                      std::size_t location, double margin);
// The same surrogate for several members of Q at once; returns |targets| x 1.
ad::Var SurrogateRanks(ad::Var scores, std::span<const std::size_t> set,
                       std::span<const std::size_t> targets, double margin);

// sum_{s in positives} w_s (2^{y_s} - 1) / (Z log2(g(s) + 1)), with g over all
// locations and Z the uncut ideal DCG of the day. Zero without positives.
ad::Var NdcgSurrogate(std::span<const double> relevance, ad::Var scores,
                      std::span<const std::size_t> positives,
                      std::span<const double> weights, double margin,
                      std::optional<double> gain_cap = std::nullopt);

// (1/|positives|) sum_{s} w_s sum_{u in N(s)} (2^{y_u} - 1) /
//   (Z_{N(s)} log2(g_{N(s)}(u) + 1)), with g restricted to N(s).
ad::Var LocalNdcgSurrogate(std::span<const double> relevance, ad::Var scores,
                           std::span<const std::size_t> positives,
                           std::span<const double> weights, double margin,
                           const NeighborhoodTable& neighborhoods,
                           std::optional<double> gain_cap = std::nullopt);

// (1 - sigma) * NdcgSurrogate + sigma * LocalNdcgSurrogate. `weights` are
// aligned with PositiveSet(relevance).
ad::Var HybridObjective(std::span<const double> relevance, ad::Var scores,
                        const SurrogateConfig& config,
                        std::span<const double> weights,
                        const NeighborhoodTable& neighborhoods);

// Turns the importance distribution into per-positive weights.
//   kWeight: w_s = P_s |S+| / sum_{S+} P (all ones for uniform P).
//   kSample: ceil(fraction |S+|) successive draws without replacement,
//            probability proportional to P on S+ (zero-mass locations are
//            never drawn); w = 1 for drawn locations, 0 otherwise.
// If P puts no mass on S+, every positive gets weight 1 (kWeight) or the draw
// is uniform (kSample). Throws ConfigError when P does not sum to 1 within
// 1e-9 or has negative entries.
std::vector<double> ApplyImportance(std::span<const std::size_t> positives,
                                    std::span<const double> probabilities,
                                    WeightMode mode, double sample_fraction,
                                    Rng& rng);

}  // namespace georank

#endif  // GEORANK_RANK_LOSSES_H_

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

#ifndef GEORANK_CROSSK_H_
#define GEORANK_CROSSK_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "georank/st_data.h"

namespace georank {

// 0, step, 2 step, ... up to and including max_distance.
std::vector<double> DistanceGrid(double max_distance = 6.0, double step = 0.5);

// K(d) = (area / |pred|) * #{(i, j): dist(true_i, pred_j) <= d} / |true|.
// Throws DataError when either set is empty.
std::vector<double> CrossK(std::span<const std::size_t> pred_points,
                           std::span<const std::size_t> true_points,
                           const GridDims& dims,
                           std::span<const double> distances);

enum class EnvelopeKind { kMinMax, kQuantile };

struct EnvelopeOptions {
  std::size_t simulations = 999;
  std::uint64_t seed = 0;
  EnvelopeKind kind = EnvelopeKind::kMinMax;
  double lower_quantile = 0.025;  // kQuantile only
  double upper_quantile = 0.975;
  std::size_t threads = 1;
};

struct Envelope {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> mean;  // pointwise mean of the simulated curves
};

// Each simulation places n_pred distinct uniformly random cells.
Envelope CsrEnvelope(std::size_t n_pred,
                     std::span<const std::size_t> true_points,
                     const GridDims& dims, std::span<const double> distances,
                     const EnvelopeOptions& options);

struct CrossKCurve {
  std::vector<double> distances;
  std::vector<double> khat;
  std::vector<double> lo;
  std::vector<double> hi;
  std::size_t simulations = 0;
  std::size_t days = 0;  // evaluation days that contributed

  std::string ToCsv() const;  // d,khat,csr_lo,csr_hi
};

// Per-day curves for the top-k predicted cells against cells with y > 0,
// averaged pointwise over days that have events. The envelope is taken over
// simulated day-averaged curves.
CrossKCurve DailyCrossK(const std::vector<std::vector<double>>& scores,
                        const std::vector<std::vector<double>>& truth,
                        const GridDims& dims, std::size_t k,
                        std::span<const double> distances,
                        const EnvelopeOptions& options);

}  // namespace georank

#endif  // GEORANK_CROSSK_H_

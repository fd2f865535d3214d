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

#ifndef GEORANK_IMPORTANCE_H_
#define GEORANK_IMPORTANCE_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "georank/st_data.h"

namespace georank {

struct ImportanceDist {
  std::vector<double> probabilities;  // P over locations, sums to 1
  std::size_t epoch = 0;
  double lambda = 1.0;

  static ImportanceDist Uniform(std::size_t locations, double lambda = 1.0);
};

// E_s = (1/T) sum_t (2^{|y_s^t - yhat_s^t|} - 1) / log2(1 + r_t(s)), with
// r_t the 1-based rank of s under the true y of day t (ties by index).
// `truth` and `predicted` hold one S-vector per day.
std::vector<double> ImportanceScores(
    const std::vector<std::vector<double>>& truth,
    const std::vector<std::vector<double>>& predicted);

// E*_u = sum_s E_s / (2 pi lambda^2) exp(-dist(u, s)^2 / (2 lambda^2)), full
// summation, no wrap-around.
std::vector<double> GaussianSmooth(std::span<const double> scores,
                                   double lambda, const GridDims& dims);

// P = E* / sum E*; uniform when everything is zero.
ImportanceDist NormalizeImportance(std::span<const double> smoothed,
                                   std::size_t epoch = 0, double lambda = 1.0);

// "row,col,probability" rows.
void WriteImportanceCsv(const ImportanceDist& dist, const GridDims& dims,
                        const std::filesystem::path& path);

}  // namespace georank

#endif  // GEORANK_IMPORTANCE_H_

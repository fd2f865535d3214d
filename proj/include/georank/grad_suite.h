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

#ifndef GEORANK_GRAD_SUITE_H_
#define GEORANK_GRAD_SUITE_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "georank/grad_check.h"

namespace georank {

struct GradSuiteOptions {
  std::size_t rows = 3;
  std::size_t cols = 3;
  std::size_t periods = 12;
  std::size_t window = 2;
  std::size_t coordinates = 150;  // sampled per model check
  std::uint64_t seed = 0;
  ad::GradCheckOptions check;
};

struct GradSuiteResult {
  std::string name;
  ad::GradCheckReport report;
};

// Finite-difference checks of the hybrid objective (wrt scores) and of the
// full model (mean score and hybrid objective, wrt every parameter).
std::vector<GradSuiteResult> RunGradientSuite(const GradSuiteOptions& options);

}  // namespace georank

#endif  // GEORANK_GRAD_SUITE_H_

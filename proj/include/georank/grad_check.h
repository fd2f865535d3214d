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

#ifndef GEORANK_GRAD_CHECK_H_
#define GEORANK_GRAD_CHECK_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "georank/autodiff.h"

namespace georank::ad {

// Builds a scalar on `tape` from parameters already bound as leaves.
using ScalarFunction =
    std::function<Var(Tape& tape, std::span<const Var> params)>;

struct GradCheckOptions {
  double eps = 1e-5;
  double tolerance = 1e-4;
  // Denominator floor of the relative error, so that coordinates whose true
  // gradient is ~0 are judged on an absolute scale.
  double abs_floor = 1e-6;
  // A coordinate that exceeds the tolerance is flagged nondifferentiable
  // (and excluded) when its one-sided difference quotients disagree by more
  // than kink_ratio * (|central| + abs_floor).
  double kink_ratio = 1e-4;
  // Check at most this many coordinates (sampled uniformly); 0 checks all.
  std::size_t max_coordinates = 0;
  std::uint64_t seed = 0;
};

struct CoordinateCheck {
  std::size_t param = 0;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
  bool nondifferentiable = false;
};

struct GradCheckReport {
  std::vector<CoordinateCheck> coordinates;
  double max_relative_error = 0.0;  // over differentiable coordinates
  std::size_t checked = 0;
  std::size_t excluded = 0;
  bool passed = false;
};

// Compares reverse-mode gradients of `f` at `params` against central
// differences. Throws ConfigError when eps <= 0 and ShapeError when `f` does
// not return a scalar.
GradCheckReport GradCheck(const ScalarFunction& f, std::vector<Tensor> params,
                          const GradCheckOptions& options = {});

}  // namespace georank::ad

#endif  // GEORANK_GRAD_CHECK_H_

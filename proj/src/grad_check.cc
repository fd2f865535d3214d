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

#include "georank/grad_check.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "georank/errors.h"
#include "georank/rng.h"

namespace georank::ad {
namespace {

double Evaluate(const ScalarFunction& f, const std::vector<Tensor>& params) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(params.size());
  for (const Tensor& p : params) vars.push_back(tape.Constant(p));
  const Var out = f(tape, vars);
  if (out.value().size() != 1) {
    throw ShapeError("GradCheck: function must return a scalar, got " +
                     ShapeToString(out.shape()));
  }
  return out.value().item();
}

}  // namespace

GradCheckReport GradCheck(const ScalarFunction& f, std::vector<Tensor> params,
                          const GradCheckOptions& options) {
  if (!(options.eps > 0.0)) throw ConfigError("GradCheck: eps must be > 0");

  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> vars;
    for (const Tensor& p : params) vars.push_back(tape.Leaf(p));
    const Var out = f(tape, vars);
    if (out.value().size() != 1) {
      throw ShapeError("GradCheck: function must return a scalar, got " +
                       ShapeToString(out.shape()));
    }
    tape.Backward(out);
    for (const Var& v : vars) analytic.push_back(tape.Grad(v));
  }

  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p].size(); ++i) coords.emplace_back(p, i);
  }
  if (options.max_coordinates > 0 && coords.size() > options.max_coordinates) {
    Rng rng(options.seed);
    rng.Shuffle(std::span(coords));
    coords.resize(options.max_coordinates);
    std::sort(coords.begin(), coords.end());
  }

  GradCheckReport report;
  const double base = Evaluate(f, params);
  for (const auto& [p, i] : coords) {
    const double original = params[p][i];
    params[p][i] = original + options.eps;
    const double plus = Evaluate(f, params);
    params[p][i] = original - options.eps;
    const double minus = Evaluate(f, params);
    params[p][i] = original;

    CoordinateCheck check;
    check.param = p;
    check.index = i;
    check.analytic = analytic[p][i];
    check.numeric = (plus - minus) / (2.0 * options.eps);
    check.relative_error =
        std::abs(check.analytic - check.numeric) /
        std::max({std::abs(check.analytic), std::abs(check.numeric),
                  options.abs_floor});
    // Only a failing coordinate can be excused as a kink, and only when the
    // one-sided quotients disagree.
    if (check.relative_error > options.tolerance) {
      const double forward = (plus - base) / options.eps;
      const double backward = (base - minus) / options.eps;
      check.nondifferentiable =
          std::abs(forward - backward) >
          options.kink_ratio * (std::abs(check.numeric) + options.abs_floor);
    }
    if (check.nondifferentiable) {
      ++report.excluded;
    } else {
      ++report.checked;
      report.max_relative_error =
          std::max(report.max_relative_error, check.relative_error);
    }
    report.coordinates.push_back(check);
  }
  report.passed = report.max_relative_error <= options.tolerance;
  return report;
}

}  // namespace georank::ad

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

#include "georank/rng.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "georank/errors.h"

namespace georank {

std::size_t Rng::Index(std::size_t n) {
  if (n == 0) throw ConfigError("Rng::Index: empty range");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return static_cast<std::size_t>(draw % bound);
}

double Rng::Normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

int Rng::Poisson(double rate) {
  if (!(rate >= 0.0) || rate > 500.0) {
    throw NumericalError("Rng::Poisson: rate out of supported range");
  }
  if (rate == 0.0) return 0;
  const double u = Uniform();
  int k = 0;
  double p = std::exp(-rate);
  double cdf = p;
  while (u >= cdf && k < 10000) {
    ++k;
    p *= rate / k;
    cdf += p;
    if (p == 0.0 && cdf < u) break;  // tail exhausted by rounding
  }
  return k;
}

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace georank

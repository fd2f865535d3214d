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

#include "georank/crossk.h"

#include <algorithm>
#include <cmath>

#include "georank/errors.h"
#include "georank/io_util.h"
#include "georank/parallel.h"
#include "georank/rank_metrics.h"
#include "georank/rng.h"

namespace georank {

std::vector<double> DistanceGrid(double max_distance, double step) {
  if (!(step > 0.0) || !(max_distance >= 0.0)) {
    throw ConfigError("distance grid needs step > 0 and max >= 0");
  }
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double d = static_cast<double>(i) * step;
    if (d > max_distance + 1e-12) break;
    out.push_back(d);
  }
  return out;
}

std::vector<double> CrossK(std::span<const std::size_t> pred_points,
                           std::span<const std::size_t> true_points,
                           const GridDims& dims,
                           std::span<const double> distances) {
  if (pred_points.empty() || true_points.empty()) {
    throw DataError("Cross-K needs non-empty predicted and true point sets");
  }
  const std::size_t S = dims.locations();
  std::vector<double> pair_dist;
  pair_dist.reserve(pred_points.size() * true_points.size());
  for (std::size_t i : true_points) {
    if (i >= S) throw DataError("true point outside the grid");
    for (std::size_t j : pred_points) {
      if (j >= S) throw DataError("predicted point outside the grid");
      pair_dist.push_back(CellDistance(ToCell(dims, i), ToCell(dims, j)));
    }
  }
  std::sort(pair_dist.begin(), pair_dist.end());
  const double area = static_cast<double>(S);
  const double scale = area / static_cast<double>(pred_points.size()) /
                       static_cast<double>(true_points.size());
  std::vector<double> out;
  out.reserve(distances.size());
  for (double d : distances) {
    // Tolerance keeps sqrt-rounded distances on the boundary inside.
    const auto n = std::upper_bound(pair_dist.begin(), pair_dist.end(),
                                    d + 1e-9) -
                   pair_dist.begin();
    out.push_back(scale * static_cast<double>(n));
  }
  return out;
}

namespace {

double Quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

void ValidateEnvelope(const EnvelopeOptions& options) {
  if (options.simulations < 1) {
    throw ConfigError("CSR envelope needs at least one simulation");
  }
  if (options.kind == EnvelopeKind::kQuantile &&
      !(options.lower_quantile >= 0.0 &&
        options.lower_quantile <= options.upper_quantile &&
        options.upper_quantile <= 1.0)) {
    throw ConfigError("CSR envelope quantiles must satisfy 0 <= lo <= hi <= 1");
  }
}

std::vector<std::size_t> RandomCells(std::size_t n, std::size_t S, Rng& rng) {
  std::vector<std::size_t> cells(S);
  for (std::size_t s = 0; s < S; ++s) cells[s] = s;
  // Partial Fisher-Yates: the first n cells are a uniform sample.
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(cells[i], cells[i + rng.Index(S - i)]);
  }
  cells.resize(n);
  return cells;
}

Envelope Summarize(const std::vector<std::vector<double>>& curves,
                   std::size_t D, const EnvelopeOptions& options) {
  Envelope env;
  env.lo.resize(D);
  env.hi.resize(D);
  env.mean.assign(D, 0.0);
  std::vector<double> column(curves.size());
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t sim = 0; sim < curves.size(); ++sim) {
      column[sim] = curves[sim][d];
      env.mean[d] += column[sim];
    }
    env.mean[d] /= static_cast<double>(curves.size());
    if (options.kind == EnvelopeKind::kMinMax) {
      const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
      env.lo[d] = *lo;
      env.hi[d] = *hi;
    } else {
      env.lo[d] = Quantile(column, options.lower_quantile);
      env.hi[d] = Quantile(column, options.upper_quantile);
    }
  }
  return env;
}

}  // namespace

Envelope CsrEnvelope(std::size_t n_pred,
                     std::span<const std::size_t> true_points,
                     const GridDims& dims, std::span<const double> distances,
                     const EnvelopeOptions& options) {
  ValidateEnvelope(options);
  const std::size_t S = dims.locations();
  if (n_pred == 0 || n_pred > S) {
    throw ConfigError("CSR envelope: n_pred must lie in [1, S]");
  }
  std::vector<std::vector<double>> curves(options.simulations);
  ParallelFor(options.simulations, options.threads, [&](std::size_t sim) {
    Rng rng(DeriveSeed(options.seed, sim));
    curves[sim] = CrossK(RandomCells(n_pred, S, rng), true_points, dims,
                         distances);
  });
  return Summarize(curves, distances.size(), options);
}

std::string CrossKCurve::ToCsv() const {
  std::string out = "d,khat,csr_lo,csr_hi\n";
  for (std::size_t i = 0; i < distances.size(); ++i) {
    out += FormatDouble(distances[i]) + ',' + FormatDouble(khat[i]) + ',' +
           FormatDouble(lo[i]) + ',' + FormatDouble(hi[i]) + '\n';
  }
  return out;
}

CrossKCurve DailyCrossK(const std::vector<std::vector<double>>& scores,
                        const std::vector<std::vector<double>>& truth,
                        const GridDims& dims, std::size_t k,
                        std::span<const double> distances,
                        const EnvelopeOptions& options) {
  ValidateEnvelope(options);
  if (scores.size() != truth.size()) {
    throw ShapeError("Cross-K: score and truth day counts differ");
  }
  const std::size_t S = dims.locations();
  if (k == 0 || k > S) throw ConfigError("Cross-K: k outside [1, S]");
  const std::size_t D = distances.size();

  std::vector<std::vector<std::size_t>> events;
  CrossKCurve curve;
  curve.distances.assign(distances.begin(), distances.end());
  curve.khat.assign(D, 0.0);
  curve.simulations = options.simulations;
  for (std::size_t day = 0; day < scores.size(); ++day) {
    if (scores[day].size() != S || truth[day].size() != S) {
      throw ShapeError("Cross-K: day " + std::to_string(day) +
                       " does not match the grid");
    }
    std::vector<std::size_t> points;
    for (std::size_t s = 0; s < S; ++s) {
      if (truth[day][s] > 0.0) points.push_back(s);
    }
    if (points.empty()) continue;
    std::vector<std::size_t> top = RankOrder(scores[day]);
    top.resize(k);
    const std::vector<double> khat = CrossK(top, points, dims, distances);
    for (std::size_t d = 0; d < D; ++d) curve.khat[d] += khat[d];
    events.push_back(std::move(points));
  }
  curve.days = events.size();
  if (curve.days == 0) {
    throw DataError("Cross-K: no evaluation day has any event");
  }
  const double n = static_cast<double>(curve.days);
  for (double& v : curve.khat) v /= n;

  // Each simulation redraws k random cells on every day and averages, so the
  // envelope describes the same day-averaged statistic as khat.
  std::vector<std::vector<double>> sims(options.simulations);
  ParallelFor(options.simulations, options.threads, [&](std::size_t sim) {
    const std::uint64_t sim_seed = DeriveSeed(options.seed, sim);
    std::vector<double> avg(D, 0.0);
    for (std::size_t day = 0; day < events.size(); ++day) {
      Rng rng(DeriveSeed(sim_seed, day));
      const std::vector<double> c =
          CrossK(RandomCells(k, S, rng), events[day], dims, distances);
      for (std::size_t d = 0; d < D; ++d) avg[d] += c[d];
    }
    for (double& v : avg) v /= n;
    sims[sim] = std::move(avg);
  });
  const Envelope env = Summarize(sims, D, options);
  curve.lo = env.lo;
  curve.hi = env.hi;
  return curve;
}

}  // namespace georank

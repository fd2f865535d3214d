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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "georank/errors.h"
#include "georank/rng.h"
#include "georank/st_data.h"

namespace georank {
namespace {

// Planted-rate model: log rate = log(kBaseRate) + kHotspotWeight * hotspot
// + kCongestionWeight * congestion(t-1) + small road/calendar terms.
constexpr double kBaseRate = 0.08;
constexpr double kHotspotWeight = 2.3;
constexpr double kCongestionWeight = 0.9;
constexpr double kRoadWeight = 0.2;
constexpr double kWeekendWeight = 0.15;
constexpr double kHolidayWeight = 0.3;
constexpr double kCongestionPersistence = 0.8;
constexpr double kNoiseSmoothing = 1.3;  // cells
constexpr double kHolidayProbability = 0.04;

// Gaussian-smoothed white noise rescaled to zero mean, unit variance.
std::vector<double> SmoothNoise(Rng& rng, const GridDims& dims) {
  const std::size_t S = dims.locations();
  std::vector<double> white(S);
  for (double& v : white) v = rng.Normal();
  std::vector<double> out(S, 0.0);
  for (std::size_t a = 0; a < S; ++a) {
    const Cell ca = ToCell(dims, a);
    for (std::size_t b = 0; b < S; ++b) {
      const double d = CellDistance(ca, ToCell(dims, b));
      out[a] += white[b] *
                std::exp(-d * d / (2.0 * kNoiseSmoothing * kNoiseSmoothing));
    }
  }
  const double mean =
      std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(S);
  double var = 0.0;
  for (double v : out) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(S));
  for (double& v : out) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  return out;
}

// Maps each feature column to [0, 1] with min/max taken over the first
// `fit_records` records, clamping values outside the fitted range.
std::vector<FeatureRange> Normalize(std::vector<double>& values,
                                    std::size_t width,
                                    std::size_t fit_records) {
  std::vector<FeatureRange> ranges(width);
  for (std::size_t k = 0; k < width; ++k) {
    double lo = values[k], hi = values[k];
    for (std::size_t r = 0; r < fit_records; ++r) {
      lo = std::min(lo, values[r * width + k]);
      hi = std::max(hi, values[r * width + k]);
    }
    ranges[k] = FeatureRange{lo, hi};
    const double span = hi - lo;
    for (std::size_t r = 0; r * width < values.size(); ++r) {
      double& v = values[r * width + k];
      v = span > 0.0 ? std::clamp((v - lo) / span, 0.0, 1.0) : 0.0;
    }
  }
  return ranges;
}

}  // namespace

SyntheticDataset GenerateSyntheticDataset(const SyntheticOptions& options) {
  if (options.rows < 2 || options.cols < 2) {
    throw ConfigError("synthetic grid needs at least 2 rows and 2 cols");
  }
  if (options.periods < 4) {
    throw ConfigError("synthetic grid needs at least 4 periods");
  }
  const GridDims dims{options.rows, options.cols};
  const std::size_t S = dims.locations();
  const std::size_t T = options.periods;
  if (options.hotspots < 1 || options.hotspots > S) {
    throw ConfigError("hotspot count must lie in [1, rows*cols]");
  }
  if (!(options.intensity >= 0.0)) {
    throw ConfigError("intensity must be non-negative");
  }
  const Splits splits = ChronologicalSplit(T, options.train_fraction);

  Rng rng(options.seed);

  // Hotspot layout.
  std::vector<std::size_t> order(S);
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(std::span(order));
  std::vector<PlantedHotspot> hotspots;
  for (std::size_t h = 0; h < options.hotspots; ++h) {
    hotspots.push_back(PlantedHotspot{ToCell(dims, order[h]),
                                      rng.Uniform(0.7, 1.0),
                                      rng.Uniform(0.9, 1.5)});
  }
  std::vector<double> hot(S, 0.0), nearest(S, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    const Cell c = ToCell(dims, s);
    double best = 1e300;
    for (const PlantedHotspot& h : hotspots) {
      const double d = CellDistance(c, h.center);
      hot[s] += h.amplitude * std::exp(-d * d / (2.0 * h.radius * h.radius));
      best = std::min(best, d);
    }
    nearest[s] = best;
  }
  const double hot_max = *std::max_element(hot.begin(), hot.end());
  for (double& v : hot) v /= hot_max;

  const std::vector<double> road = SmoothNoise(rng, dims);
  const std::vector<double> poi_noise = SmoothNoise(rng, dims);

  constexpr std::size_t d_s = kSyntheticSpatialFeatures;
  std::vector<double> spatial(S * d_s);
  for (std::size_t s = 0; s < S; ++s) {
    const Cell c = ToCell(dims, s);
    double* row = &spatial[s * d_s];
    row[0] = hot[s];
    row[1] = nearest[s];
    row[2] = road[s];
    row[3] = 0.6 * hot[s] + 0.4 * poi_noise[s];
    row[4] = static_cast<double>(c.row) / static_cast<double>(dims.rows - 1);
    row[5] = static_cast<double>(c.col) / static_cast<double>(dims.cols - 1);
  }

  // Calendar and weather signals.
  constexpr std::size_t d_t = kSyntheticTemporalFeatures;
  std::vector<double> temporal(T * d_t);
  std::vector<double> weekend(T), holiday(T);
  double weather = rng.Normal();
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t dow = t % 7;
    weekend[t] = dow >= 5 ? 1.0 : 0.0;
    holiday[t] = rng.Uniform() < kHolidayProbability ? 1.0 : 0.0;
    weather = 0.8 * weather + 0.6 * rng.Normal();
    double* row = &temporal[t * d_t];
    row[0] = static_cast<double>(dow) / 6.0;
    row[1] = weekend[t];
    row[2] = holiday[t];
    row[3] = weather;
  }

  // Persistent congestion field; congestion[t + 1] holds period t, index 0 is
  // the period before the series starts.
  std::vector<std::vector<double>> congestion(T + 1);
  congestion[0] = SmoothNoise(rng, dims);
  const double innovation =
      std::sqrt(1.0 - kCongestionPersistence * kCongestionPersistence);
  for (std::size_t t = 1; t <= T; ++t) {
    const std::vector<double> shock = SmoothNoise(rng, dims);
    congestion[t].resize(S);
    for (std::size_t s = 0; s < S; ++s) {
      congestion[t][s] =
          kCongestionPersistence * congestion[t - 1][s] + innovation * shock[s];
    }
  }

  constexpr std::size_t d_st = kSyntheticSpatiotemporalFeatures;
  std::vector<double> spatiotemporal(T * S * d_st);
  std::vector<double> rate(T * S), risk(T * S);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      const double now = congestion[t + 1][s];
      const double volume = road[s] + 0.6 * now + 0.3 * weekend[t];
      double* row = &spatiotemporal[(t * S + s) * d_st];
      row[0] = volume;
      row[1] = now + 0.3 * rng.Normal();
      row[2] = -0.5 * volume + 0.3 * rng.Normal();

      const double log_rate =
          std::log(kBaseRate) + kHotspotWeight * hot[s] +
          kCongestionWeight * congestion[t][s] + kRoadWeight * road[s] +
          kWeekendWeight * weekend[t] + kHolidayWeight * holiday[t];
      rate[t * S + s] = options.intensity * std::exp(log_rate);
      risk[t * S + s] = std::min(
          static_cast<double>(rng.Poisson(rate[t * S + s])), kMaxSyntheticRisk);
    }
  }

  Normalization norm;
  norm.spatial = Normalize(spatial, d_s, S);
  norm.temporal = Normalize(temporal, d_t, std::max<std::size_t>(
                                                splits.train_end, 1));
  norm.spatiotemporal =
      Normalize(spatiotemporal, d_st,
                std::max<std::size_t>(splits.train_end, 1) * S);

  GridShape shape{dims, T, d_t, d_s, d_st};
  StGrid grid(shape, std::move(temporal), std::move(spatial),
              std::move(spatiotemporal), std::move(risk), std::move(norm));
  ValidateSplits(grid, splits);
  return SyntheticDataset{std::move(grid), std::move(rate),
                          std::move(hotspots)};
}

StGrid GenerateSynthetic(std::uint64_t seed, std::size_t rows,
                         std::size_t cols, std::size_t periods,
                         std::size_t hotspots) {
  SyntheticOptions options;
  options.seed = seed;
  options.rows = rows;
  options.cols = cols;
  options.periods = periods;
  options.hotspots = hotspots;
  return GenerateSyntheticDataset(options).grid;
}

}  // namespace georank

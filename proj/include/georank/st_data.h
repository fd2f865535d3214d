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

#ifndef GEORANK_ST_DATA_H_
#define GEORANK_ST_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace georank {

// Fraction of periods used for training when no explicit split is given.
inline constexpr double kDefaultTrainFraction = 0.7;

struct GridDims {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t locations() const { return rows * cols; }
  bool operator==(const GridDims&) const = default;
};

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;

  bool operator==(const Cell&) const = default;
};

// Location ids are row-major over the grid: id = row * cols + col. Every
// module uses this ordering.
std::size_t ToLocation(const GridDims& dims, Cell cell);
Cell ToCell(const GridDims& dims, std::size_t location);
// Euclidean distance between cell centers, in cell units.
double CellDistance(Cell a, Cell b);

struct FeatureRange {
  double min = 0.0;
  double max = 1.0;
};

// Raw min/max used to map each feature to [0, 1], computed on the training
// periods.
struct Normalization {
  std::vector<FeatureRange> temporal;
  std::vector<FeatureRange> spatial;
  std::vector<FeatureRange> spatiotemporal;
};

struct GridShape {
  GridDims dims;
  std::size_t periods = 0;
  std::size_t temporal_features = 0;        // d_t
  std::size_t spatial_features = 0;         // d_s
  std::size_t spatiotemporal_features = 0;  // d_st
};

// Immutable spatiotemporal field of features and risk scores.
//
// Storage layouts (row-major, locations in ToLocation order):
//   temporal        [t][k]     T x d_t
//   spatial         [s][k]     S x d_s
//   spatiotemporal  [t][s][k]  T x S x d_st
//   risk            [t][s]     T x S
//
// The constructor checks dimension consistency, finiteness, and y >= 0 and
// throws DataError naming the offending axis or coordinate.
class StGrid {
 public:
  StGrid(GridShape shape, std::vector<double> temporal,
         std::vector<double> spatial, std::vector<double> spatiotemporal,
         std::vector<double> risk, Normalization normalization = {});

  const GridShape& shape() const { return shape_; }
  const GridDims& dims() const { return shape_.dims; }
  std::size_t rows() const { return shape_.dims.rows; }
  std::size_t cols() const { return shape_.dims.cols; }
  std::size_t locations() const { return shape_.dims.locations(); }
  std::size_t periods() const { return shape_.periods; }
  std::size_t temporal_features() const { return shape_.temporal_features; }
  std::size_t spatial_features() const { return shape_.spatial_features; }
  std::size_t spatiotemporal_features() const {
    return shape_.spatiotemporal_features;
  }
  const Normalization& normalization() const { return normalization_; }

  double temporal(std::size_t t, std::size_t k) const {
    return temporal_[t * shape_.temporal_features + k];
  }
  double spatial(std::size_t s, std::size_t k) const {
    return spatial_[s * shape_.spatial_features + k];
  }
  double spatiotemporal(std::size_t s, std::size_t t, std::size_t k) const {
    return spatiotemporal_[(t * locations() + s) *
                               shape_.spatiotemporal_features + k];
  }
  double risk(std::size_t s, std::size_t t) const {
    return risk_[t * locations() + s];
  }

  std::span<const double> TemporalAt(std::size_t t) const;        // d_t
  std::span<const double> SpatiotemporalAt(std::size_t t) const;  // S*d_st
  std::span<const double> RiskAt(std::size_t t) const;            // S

  std::span<const double> temporal_data() const { return temporal_; }
  std::span<const double> spatial_data() const { return spatial_; }
  std::span<const double> spatiotemporal_data() const {
    return spatiotemporal_;
  }
  std::span<const double> risk_data() const { return risk_; }

  bool operator==(const StGrid& other) const;

 private:
  GridShape shape_;
  std::vector<double> temporal_;
  std::vector<double> spatial_;
  std::vector<double> spatiotemporal_;
  std::vector<double> risk_;
  Normalization normalization_;
};

// Inputs are the n periods [target - n, target - 1]; the ranking target is
// `target`.
struct Window {
  std::size_t first_input = 0;
  std::size_t length = 0;
  std::size_t target = 0;

  bool operator==(const Window&) const = default;
};

// All T - n windows of length n, targets n .. T-1 in increasing order.
std::vector<Window> MakeWindows(const StGrid& grid, std::size_t length);

// Chronological train/validation split: train periods [0, train_end),
// validation periods [train_end, T).
struct Splits {
  std::size_t train_end = 0;
};

Splits ChronologicalSplit(std::size_t periods,
                          double train_fraction = kDefaultTrainFraction);
// Checks the split against the grid: both parts non-empty and the training
// part holds at least one positive risk score.
void ValidateSplits(const StGrid& grid, const Splits& splits);
std::vector<Window> TrainWindows(const StGrid& grid, std::size_t length,
                                 const Splits& splits);
std::vector<Window> ValidationWindows(const StGrid& grid, std::size_t length,
                                      const Splits& splits);

// Writes manifest.json plus f_t.csv, f_s.csv, f_st.csv and y.csv into
// `directory` and returns the manifest path. LoadGrid(SaveGrid(g)) == g.
std::filesystem::path SaveGrid(const StGrid& grid,
                               const std::filesystem::path& directory);
StGrid LoadGrid(const std::filesystem::path& manifest_path);

struct SyntheticOptions {
  std::uint64_t seed = 0;
  std::size_t rows = 8;
  std::size_t cols = 8;
  std::size_t periods = 120;
  std::size_t hotspots = 3;
  // Multiplies the planted Poisson rates; 0 yields an all-zero field, which
  // is rejected.
  double intensity = 1.0;
  // Periods used for the normalization statistics.
  double train_fraction = kDefaultTrainFraction;
};

struct PlantedHotspot {
  Cell center;
  double amplitude = 0.0;
  double radius = 0.0;  // Gaussian footprint scale, cells
};

struct SyntheticDataset {
  StGrid grid;
  std::vector<double> rate;  // planted Poisson rate, [t][s]
  std::vector<PlantedHotspot> hotspots;
};

inline constexpr std::size_t kSyntheticTemporalFeatures = 4;
inline constexpr std::size_t kSyntheticSpatialFeatures = 6;
inline constexpr std::size_t kSyntheticSpatiotemporalFeatures = 3;
inline constexpr double kMaxSyntheticRisk = 12.0;

// Deterministic generator standing in for real event feeds. Risk counts are
// Poisson draws (capped at kMaxSyntheticRisk) around a rate driven by the
// hotspot layout and the previous period's congestion, so brute-force top-K
// ground truth is available. Requires rows, cols >= 4, periods >= 30 and at
// least one hotspot.
SyntheticDataset GenerateSyntheticDataset(const SyntheticOptions& options);
StGrid GenerateSynthetic(std::uint64_t seed, std::size_t rows,
                         std::size_t cols, std::size_t periods,
                         std::size_t hotspots);

}  // namespace georank

#endif  // GEORANK_ST_DATA_H_

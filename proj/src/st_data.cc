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

#include "georank/st_data.h"

#include <cmath>
#include <string>

#include "georank/errors.h"

namespace georank {
namespace {

std::string CellText(const GridDims& dims, std::size_t s) {
  const Cell c = ToCell(dims, s);
  return "row=" + std::to_string(c.row) + ",col=" + std::to_string(c.col);
}

void RequireSize(const char* what, std::size_t got, std::size_t expected,
                 const std::string& layout) {
  if (got != expected) {
    throw DataError(std::string("dimension mismatch in ") + what + ": expected " +
                    std::to_string(expected) + " values (" + layout +
                    "), got " + std::to_string(got));
  }
}

}  // namespace

std::size_t ToLocation(const GridDims& dims, Cell cell) {
  if (cell.row >= dims.rows || cell.col >= dims.cols) {
    throw DataError("cell (" + std::to_string(cell.row) + "," +
                    std::to_string(cell.col) + ") outside " +
                    std::to_string(dims.rows) + "x" + std::to_string(dims.cols) +
                    " grid");
  }
  return cell.row * dims.cols + cell.col;
}

Cell ToCell(const GridDims& dims, std::size_t location) {
  if (location >= dims.locations()) {
    throw DataError("location " + std::to_string(location) + " out of range");
  }
  return Cell{location / dims.cols, location % dims.cols};
}

double CellDistance(Cell a, Cell b) {
  const double dr = static_cast<double>(a.row) - static_cast<double>(b.row);
  const double dc = static_cast<double>(a.col) - static_cast<double>(b.col);
  return std::sqrt(dr * dr + dc * dc);
}

StGrid::StGrid(GridShape shape, std::vector<double> temporal,
               std::vector<double> spatial, std::vector<double> spatiotemporal,
               std::vector<double> risk, Normalization normalization)
    : shape_(shape),
      temporal_(std::move(temporal)),
      spatial_(std::move(spatial)),
      spatiotemporal_(std::move(spatiotemporal)),
      risk_(std::move(risk)),
      normalization_(std::move(normalization)) {
  const GridDims& dims = shape_.dims;
  if (dims.rows == 0 || dims.cols == 0 || shape_.periods == 0) {
    throw DataError("grid must have positive rows, cols and periods");
  }
  const std::size_t S = dims.locations();
  const std::size_t T = shape_.periods;
  RequireSize("temporal features", temporal_.size(),
              T * shape_.temporal_features, "T x d_t");
  RequireSize("spatial features", spatial_.size(),
              S * shape_.spatial_features, "M x N x d_s");
  RequireSize("spatiotemporal features", spatiotemporal_.size(),
              T * S * shape_.spatiotemporal_features, "M x N x T x d_st");
  RequireSize("risk", risk_.size(), T * S, "M x N x T");

  const auto check_ranges = [](const char* what,
                               const std::vector<FeatureRange>& ranges,
                               std::size_t count) {
    if (!ranges.empty() && ranges.size() != count) {
      throw DataError(std::string("normalization for ") + what + " has " +
                      std::to_string(ranges.size()) + " entries, expected " +
                      std::to_string(count));
    }
  };
  check_ranges("temporal features", normalization_.temporal,
               shape_.temporal_features);
  check_ranges("spatial features", normalization_.spatial,
               shape_.spatial_features);
  check_ranges("spatiotemporal features", normalization_.spatiotemporal,
               shape_.spatiotemporal_features);

  for (std::size_t i = 0; i < temporal_.size(); ++i) {
    if (!std::isfinite(temporal_[i])) {
      throw DataError("non-finite temporal feature at (t=" +
                      std::to_string(i / shape_.temporal_features) +
                      ",k=" + std::to_string(i % shape_.temporal_features) +
                      ")");
    }
  }
  for (std::size_t i = 0; i < spatial_.size(); ++i) {
    if (!std::isfinite(spatial_[i])) {
      throw DataError("non-finite spatial feature at (" +
                      CellText(dims, i / shape_.spatial_features) + ",k=" +
                      std::to_string(i % shape_.spatial_features) + ")");
    }
  }
  const std::size_t d_st = shape_.spatiotemporal_features;
  for (std::size_t i = 0; i < spatiotemporal_.size(); ++i) {
    if (!std::isfinite(spatiotemporal_[i])) {
      const std::size_t ts = i / d_st;
      throw DataError("non-finite spatiotemporal feature at (" +
                      CellText(dims, ts % S) + ",t=" +
                      std::to_string(ts / S) + ",k=" +
                      std::to_string(i % d_st) + ")");
    }
  }
  for (std::size_t i = 0; i < risk_.size(); ++i) {
    const std::string where =
        "(" + CellText(dims, i % S) + ",t=" + std::to_string(i / S) + ")";
    if (!std::isfinite(risk_[i])) {
      throw DataError("non-finite risk value at " + where);
    }
    if (risk_[i] < 0.0) throw DataError("negative risk value at " + where);
  }
}

std::span<const double> StGrid::TemporalAt(std::size_t t) const {
  return std::span<const double>(temporal_).subspan(
      t * shape_.temporal_features, shape_.temporal_features);
}

std::span<const double> StGrid::SpatiotemporalAt(std::size_t t) const {
  const std::size_t block = locations() * shape_.spatiotemporal_features;
  return std::span<const double>(spatiotemporal_).subspan(t * block, block);
}

std::span<const double> StGrid::RiskAt(std::size_t t) const {
  return std::span<const double>(risk_).subspan(t * locations(), locations());
}

bool StGrid::operator==(const StGrid& other) const {
  const auto same_ranges = [](const std::vector<FeatureRange>& a,
                              const std::vector<FeatureRange>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].min != b[i].min || a[i].max != b[i].max) return false;
    }
    return true;
  };
  return shape_.dims == other.shape_.dims &&
         shape_.periods == other.shape_.periods &&
         shape_.temporal_features == other.shape_.temporal_features &&
         shape_.spatial_features == other.shape_.spatial_features &&
         shape_.spatiotemporal_features ==
             other.shape_.spatiotemporal_features &&
         temporal_ == other.temporal_ && spatial_ == other.spatial_ &&
         spatiotemporal_ == other.spatiotemporal_ && risk_ == other.risk_ &&
         same_ranges(normalization_.temporal, other.normalization_.temporal) &&
         same_ranges(normalization_.spatial, other.normalization_.spatial) &&
         same_ranges(normalization_.spatiotemporal,
                     other.normalization_.spatiotemporal);
}

std::vector<Window> MakeWindows(const StGrid& grid, std::size_t length) {
  if (length == 0) throw ConfigError("window length must be positive");
  if (length >= grid.periods()) {
    throw ConfigError("window length " + std::to_string(length) +
                      " must be smaller than the number of periods " +
                      std::to_string(grid.periods()));
  }
  std::vector<Window> windows;
  windows.reserve(grid.periods() - length);
  for (std::size_t t = length; t < grid.periods(); ++t) {
    windows.push_back(Window{t - length, length, t});
  }
  return windows;
}

Splits ChronologicalSplit(std::size_t periods, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
  const auto train_end = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(periods)));
  return Splits{train_end};
}

void ValidateSplits(const StGrid& grid, const Splits& splits) {
  if (splits.train_end == 0 || splits.train_end >= grid.periods()) {
    throw DataError("split leaves an empty training or validation part "
                    "(train_end=" + std::to_string(splits.train_end) +
                    ", T=" + std::to_string(grid.periods()) + ")");
  }
  for (std::size_t t = 0; t < splits.train_end; ++t) {
    for (double y : grid.RiskAt(t)) {
      if (y > 0.0) return;
    }
  }
  throw DataError("training split contains no positive risk score");
}

std::vector<Window> TrainWindows(const StGrid& grid, std::size_t length,
                                 const Splits& splits) {
  std::vector<Window> out;
  for (const Window& w : MakeWindows(grid, length)) {
    if (w.target < splits.train_end) out.push_back(w);
  }
  return out;
}

std::vector<Window> ValidationWindows(const StGrid& grid, std::size_t length,
                                      const Splits& splits) {
  std::vector<Window> out;
  for (const Window& w : MakeWindows(grid, length)) {
    if (w.target >= splits.train_end) out.push_back(w);
  }
  return out;
}

}  // namespace georank

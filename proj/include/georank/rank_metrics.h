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

#ifndef GEORANK_RANK_METRICS_H_
#define GEORANK_RANK_METRICS_H_

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "georank/st_data.h"

namespace georank {

// Location ids sorted by descending score; ties go to the lower id.
std::vector<std::size_t> RankOrder(std::span<const double> scores);
// 1-based rank of every location under RankOrder.
std::vector<std::size_t> Ranks(std::span<const double> scores);
std::size_t RankOf(std::span<const double> scores, std::size_t location);

inline double Gain(double relevance) { return std::exp2(relevance) - 1.0; }
inline double Discount(std::size_t rank) {
  return 1.0 / std::log2(1.0 + static_cast<double>(rank));
}

// DCG of the best possible ordering, truncated at k.
double IdealDcg(std::span<const double> relevance, std::size_t k);

// NDCG@k with gains 2^y - 1 and discount 1/log2(1 + rank). Both the predicted
// and the ideal list are cut at k; k = S gives the uncut metric. Returns
// nullopt when every relevance is zero.
std::optional<double> NdcgAtK(std::span<const double> relevance,
                              std::span<const double> scores, std::size_t k);

// |top-k(scores) ∩ {y > 0}| / k.
double PrecisionAtK(std::span<const double> relevance,
                    std::span<const double> scores, std::size_t k);

// Cells within Euclidean distance <= radius of each center, center included,
// listed by ascending location id.
class NeighborhoodTable {
 public:
  NeighborhoodTable(GridDims dims, double radius);

  std::span<const std::size_t> Members(std::size_t center) const {
    return std::span<const std::size_t>(members_).subspan(
        offsets_[center], offsets_[center + 1] - offsets_[center]);
  }
  const GridDims& dims() const { return dims_; }
  double radius() const { return radius_; }
  std::size_t locations() const { return offsets_.size() - 1; }

 private:
  GridDims dims_;
  double radius_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> members_;
};

// Mean over centers of the uncut NDCG of the ranking restricted to each
// neighborhood. Centers whose neighborhood has zero ideal DCG are skipped;
// nullopt when all are.
std::optional<double> LocalNdcg(std::span<const double> relevance,
                                std::span<const double> scores,
                                const NeighborhoodTable& neighborhoods);
std::optional<double> LocalNdcg(std::span<const double> relevance,
                                std::span<const double> scores, GridDims dims,
                                double radius);

// Scores over all locations for one target period.
struct DayScores {
  std::size_t target = 0;
  std::vector<double> scores;
};
using Predictions = std::vector<DayScores>;

struct MetricSummary {
  std::string metric;  // "ndcg", "prec" or "lndcg"
  std::size_t k = 0;
  double mean = 0.0;   // NaN when no day is defined
  double stddev = 0.0; // population standard deviation over defined days
  std::size_t defined_days = 0;
  std::vector<std::optional<double>> per_day;
};

struct RankingReport {
  std::string split;
  std::vector<std::size_t> days;
  std::vector<MetricSummary> metrics;

  const MetricSummary* Find(const std::string& metric, std::size_t k) const;
  std::string ToJson() const;
  std::string ToCsv() const;
};

// Per-k NDCG, Prec and L-NDCG over the predicted days. Undefined days are
// excluded from means. Throws ConfigError for k outside [1, S] and DataError
// when a prediction does not match the grid.
RankingReport MetricReport(const StGrid& grid, const Predictions& predictions,
                           std::span<const std::size_t> ks, double radius,
                           std::string split = "val");

}  // namespace georank

#endif  // GEORANK_RANK_METRICS_H_

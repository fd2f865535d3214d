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

#include "georank/rank_metrics.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include "georank/errors.h"
#include "georank/io_util.h"
#include "nlohmann/json.hpp"

namespace georank {
namespace {

void RequireAligned(std::span<const double> relevance,
                    std::span<const double> scores) {
  if (relevance.size() != scores.size()) {
    throw ShapeError("relevance and scores differ in length (" +
                     std::to_string(relevance.size()) + " vs " +
                     std::to_string(scores.size()) + ")");
  }
}

void RequireCutoff(std::size_t k, std::size_t n) {
  if (k == 0 || k > n) {
    throw ConfigError("cutoff K=" + std::to_string(k) + " outside [1, " +
                      std::to_string(n) + "]");
  }
}

}  // namespace

std::vector<std::size_t> RankOrder(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  return order;
}

std::vector<std::size_t> Ranks(std::span<const double> scores) {
  const std::vector<std::size_t> order = RankOrder(scores);
  std::vector<std::size_t> ranks(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) ranks[order[i]] = i + 1;
  return ranks;
}

std::size_t RankOf(std::span<const double> scores, std::size_t location) {
  if (location >= scores.size()) {
    throw ConfigError("RankOf: location out of range");
  }
  const double mine = scores[location];
  std::size_t rank = 1;
  for (std::size_t s = 0; s < scores.size(); ++s) {
    if (scores[s] > mine || (scores[s] == mine && s < location)) ++rank;
  }
  return rank;
}

double IdealDcg(std::span<const double> relevance, std::size_t k) {
  std::vector<double> sorted(relevance.begin(), relevance.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, sorted.size()); ++i) {
    dcg += Gain(sorted[i]) * Discount(i + 1);
  }
  return dcg;
}

std::optional<double> NdcgAtK(std::span<const double> relevance,
                              std::span<const double> scores, std::size_t k) {
  RequireAligned(relevance, scores);
  RequireCutoff(k, relevance.size());
  const double ideal = IdealDcg(relevance, k);
  if (ideal <= 0.0) return std::nullopt;
  const std::vector<std::size_t> order = RankOrder(scores);
  double dcg = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    dcg += Gain(relevance[order[i]]) * Discount(i + 1);
  }
  return dcg / ideal;
}

double PrecisionAtK(std::span<const double> relevance,
                    std::span<const double> scores, std::size_t k) {
  RequireAligned(relevance, scores);
  RequireCutoff(k, relevance.size());
  const std::vector<std::size_t> order = RankOrder(scores);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += relevance[order[i]] > 0.0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

NeighborhoodTable::NeighborhoodTable(GridDims dims, double radius)
    : dims_(dims), radius_(radius) {
  if (!(radius >= 0.0)) throw ConfigError("neighborhood radius must be >= 0");
  const std::size_t S = dims.locations();
  offsets_.reserve(S + 1);
  offsets_.push_back(0);
  for (std::size_t center = 0; center < S; ++center) {
    const Cell c = ToCell(dims, center);
    for (std::size_t s = 0; s < S; ++s) {
      if (CellDistance(c, ToCell(dims, s)) <= radius) members_.push_back(s);
    }
    offsets_.push_back(members_.size());
  }
}

std::optional<double> LocalNdcg(std::span<const double> relevance,
                                std::span<const double> scores,
                                const NeighborhoodTable& neighborhoods) {
  RequireAligned(relevance, scores);
  if (neighborhoods.locations() != relevance.size()) {
    throw ShapeError("neighborhood table does not match the score vector");
  }
  double total = 0.0;
  std::size_t counted = 0;
  std::vector<double> local_y, local_scores;
  for (std::size_t center = 0; center < relevance.size(); ++center) {
    const auto members = neighborhoods.Members(center);
    local_y.clear();
    local_scores.clear();
    for (std::size_t s : members) {
      local_y.push_back(relevance[s]);
      local_scores.push_back(scores[s]);
    }
    const double ideal = IdealDcg(local_y, local_y.size());
    if (ideal <= 0.0) continue;
    const std::vector<std::size_t> order = RankOrder(local_scores);
    double dcg = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      dcg += Gain(local_y[order[i]]) * Discount(i + 1);
    }
    total += dcg / ideal;
    ++counted;
  }
  if (counted == 0) return std::nullopt;
  return total / static_cast<double>(counted);
}

std::optional<double> LocalNdcg(std::span<const double> relevance,
                                std::span<const double> scores, GridDims dims,
                                double radius) {
  return LocalNdcg(relevance, scores, NeighborhoodTable(dims, radius));
}

const MetricSummary* RankingReport::Find(const std::string& metric,
                                         std::size_t k) const {
  for (const MetricSummary& m : metrics) {
    if (m.metric == metric && m.k == k) return &m;
  }
  return nullptr;
}

std::string RankingReport::ToJson() const {
  using nlohmann::json;
  const auto number = [](double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
  };
  json out = {{"split", split}, {"days", days}, {"metrics", json::array()}};
  for (const MetricSummary& m : metrics) {
    json per_day = json::array();
    for (const auto& v : m.per_day) {
      per_day.push_back(v ? json(*v) : json(nullptr));
    }
    out["metrics"].push_back({{"metric", m.metric},
                              {"K", m.k},
                              {"mean", number(m.mean)},
                              {"std", number(m.stddev)},
                              {"defined_days", m.defined_days},
                              {"per_day", per_day}});
  }
  return out.dump(2) + "\n";
}

std::string RankingReport::ToCsv() const {
  std::string csv = "metric,K,mean,std,defined_days\n";
  for (const MetricSummary& m : metrics) {
    csv += m.metric + "," + std::to_string(m.k) + "," +
           (std::isfinite(m.mean) ? FormatDouble(m.mean) : "") + "," +
           (std::isfinite(m.stddev) ? FormatDouble(m.stddev) : "") + "," +
           std::to_string(m.defined_days) + "\n";
  }
  return csv;
}

RankingReport MetricReport(const StGrid& grid, const Predictions& predictions,
                           std::span<const std::size_t> ks, double radius,
                           std::string split) {
  const std::size_t S = grid.locations();
  for (std::size_t k : ks) RequireCutoff(k, S);
  for (const DayScores& day : predictions) {
    if (day.target >= grid.periods() || day.scores.size() != S) {
      throw DataError("prediction for period " + std::to_string(day.target) +
                      " does not match the grid");
    }
  }
  const NeighborhoodTable neighborhoods(grid.dims(), radius);

  RankingReport report;
  report.split = std::move(split);
  for (const DayScores& day : predictions) report.days.push_back(day.target);

  const auto summarize = [](MetricSummary& m) {
    double sum = 0.0;
    for (const auto& v : m.per_day) {
      if (v) {
        sum += *v;
        ++m.defined_days;
      }
    }
    if (m.defined_days == 0) {
      m.mean = m.stddev = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    m.mean = sum / static_cast<double>(m.defined_days);
    double var = 0.0;
    for (const auto& v : m.per_day) {
      if (v) var += (*v - m.mean) * (*v - m.mean);
    }
    m.stddev = std::sqrt(var / static_cast<double>(m.defined_days));
  };

  std::vector<std::optional<double>> local;
  for (const DayScores& day : predictions) {
    local.push_back(LocalNdcg(grid.RiskAt(day.target), day.scores,
                              neighborhoods));
  }
  for (std::size_t k : ks) {
    MetricSummary ndcg, prec, lndcg;
    ndcg.metric = "ndcg";
    prec.metric = "prec";
    lndcg.metric = "lndcg";
    ndcg.k = prec.k = lndcg.k = k;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      const auto y = grid.RiskAt(predictions[i].target);
      ndcg.per_day.push_back(NdcgAtK(y, predictions[i].scores, k));
      prec.per_day.push_back(PrecisionAtK(y, predictions[i].scores, k));
      lndcg.per_day.push_back(local[i]);
    }
    summarize(ndcg);
    summarize(prec);
    summarize(lndcg);
    report.metrics.push_back(std::move(ndcg));
    report.metrics.push_back(std::move(prec));
    report.metrics.push_back(std::move(lndcg));
  }
  return report;
}

}  // namespace georank

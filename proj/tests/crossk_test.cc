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

#include <cmath>

#include "georank/errors.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace georank {
namespace {

using Idx = std::vector<std::size_t>;

double BruteCrossK(const Idx& pred, const Idx& truth, const GridDims& dims,
                   double d) {
  double pairs = 0.0;
  for (std::size_t t : truth) {
    for (std::size_t p : pred) {
      const double dr = double(t / dims.cols) - double(p / dims.cols);
      const double dc = double(t % dims.cols) - double(p % dims.cols);
      pairs += std::sqrt(dr * dr + dc * dc) <= d + 1e-9;
    }
  }
  const double area = static_cast<double>(dims.rows * dims.cols);
  return area / pred.size() * pairs / truth.size();
}

TEST(DistanceGridTest, IncludesEndpoint) {
  const auto d = DistanceGrid(6.0, 0.5);
  ASSERT_EQ(d.size(), 13u);
  EXPECT_EQ(d.front(), 0.0);
  EXPECT_DOUBLE_EQ(d.back(), 6.0);
}

TEST(CrossKTest, Examples) {
  const GridDims dims{4, 4};
  const std::vector<double> d = {0.0, 1.0, 100.0};
  // Same single cell: every distance counts the pair.
  const auto same = CrossK(Idx{5}, Idx{5}, dims, d);
  EXPECT_DOUBLE_EQ(same[0], 16.0);
  // Distinct cells: nothing at d = 0, adjacent at d = 1.
  const auto apart = CrossK(Idx{5}, Idx{6}, dims, d);
  EXPECT_EQ(apart[0], 0.0);
  EXPECT_DOUBLE_EQ(apart[1], 16.0);
  // Saturation at large d equals the area.
  const auto many = CrossK(Idx{0, 3, 9}, Idx{1, 15}, dims, d);
  EXPECT_DOUBLE_EQ(many[2], 16.0);
}

TEST(CrossKTest, MatchesBruteForceAndIsMonotone) {
  Rng rng(601);
  const auto distances = DistanceGrid(6.0, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    const GridDims dims{2 + rng.Index(7), 2 + rng.Index(7)};
    const std::size_t S = dims.rows * dims.cols;
    Idx pred, truth;
    for (std::size_t s = 0; s < S; ++s) {
      if (rng.Uniform() < 0.3) pred.push_back(s);
      if (rng.Uniform() < 0.3) truth.push_back(s);
    }
    if (pred.empty() || truth.empty()) continue;
    const auto k = CrossK(pred, truth, dims, distances);
    for (std::size_t i = 0; i < distances.size(); ++i) {
      EXPECT_NEAR(k[i], BruteCrossK(pred, truth, dims, distances[i]), 1e-12);
      if (i > 0) {
        EXPECT_GE(k[i], k[i - 1]);
      }
    }
  }
}

TEST(CrossKTest, TranslationInvariant) {
  const GridDims dims{8, 8};
  const auto distances = DistanceGrid(4.0, 0.5);
  const Idx pred = {9, 10, 18}, truth = {11, 19, 27};
  Idx pred2, truth2;  // shifted by (+2, +3)
  for (std::size_t s : pred) pred2.push_back(s + 2 * 8 + 3);
  for (std::size_t s : truth) truth2.push_back(s + 2 * 8 + 3);
  EXPECT_EQ(CrossK(pred, truth, dims, distances),
            CrossK(pred2, truth2, dims, distances));
}

TEST(CrossKTest, EmptySetsAreDataErrors) {
  const GridDims dims{3, 3};
  const std::vector<double> d = {1.0};
  EXPECT_THROW(CrossK(Idx{}, Idx{1}, dims, d), DataError);
  EXPECT_THROW(CrossK(Idx{1}, Idx{}, dims, d), DataError);
}

TEST(CsrEnvelopeTest, DeterministicAndOrdered) {
  const GridDims dims{6, 6};
  const auto distances = DistanceGrid(3.0, 0.5);
  EnvelopeOptions options;
  options.simulations = 199;
  options.seed = 17;
  const Idx truth = {3, 14, 20, 33};
  const Envelope a = CsrEnvelope(5, truth, dims, distances, options);
  const Envelope b = CsrEnvelope(5, truth, dims, distances, options);
  EXPECT_EQ(a.lo, b.lo);
  EXPECT_EQ(a.hi, b.hi);
  options.threads = 2;
  const Envelope c = CsrEnvelope(5, truth, dims, distances, options);
  EXPECT_EQ(a.hi, c.hi);
  for (std::size_t i = 0; i < distances.size(); ++i) {
    EXPECT_LE(a.lo[i], a.mean[i]);
    EXPECT_LE(a.mean[i], a.hi[i]);
  }
  options.kind = EnvelopeKind::kQuantile;
  const Envelope q = CsrEnvelope(5, truth, dims, distances, options);
  for (std::size_t i = 0; i < distances.size(); ++i) {
    EXPECT_GE(q.lo[i], a.lo[i]);
    EXPECT_LE(q.hi[i], a.hi[i]);
  }
}

TEST(DailyCrossKTest, PerfectPredictorAboveEnvelope) {
  const GridDims dims{8, 8};
  Rng rng(602);
  std::vector<std::vector<double>> truth, scores;
  for (int day = 0; day < 10; ++day) {
    std::vector<double> y(64, 0.0);
    // Events clustered in the top-left 3 x 3 block.
    for (int e = 0; e < 3; ++e) y[rng.Index(3) * 8 + rng.Index(3)] = 1.0;
    truth.push_back(y);
    scores.push_back(y);
  }
  EnvelopeOptions options;
  options.simulations = 99;
  options.seed = 3;
  const CrossKCurve curve =
      DailyCrossK(scores, truth, dims, 3, DistanceGrid(6.0, 0.5), options);
  EXPECT_EQ(curve.days, 10u);
  EXPECT_GT(curve.khat[0], curve.hi[0]);
  EXPECT_EQ(curve.ToCsv().substr(0, 17), "d,khat,csr_lo,csr");
}

}  // namespace
}  // namespace georank

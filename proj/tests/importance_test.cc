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

#include "georank/importance.h"

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "georank/errors.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace georank {
namespace {

using V = std::vector<double>;

TEST(ImportanceScoresTest, SingleMissAtTopGivesOne) {
  const auto e = ImportanceScores({{1, 0}}, {{0, 0}});
  EXPECT_DOUBLE_EQ(e[0], 1.0);
  EXPECT_DOUBLE_EQ(e[1], 0.0);
}

TEST(ImportanceScoresTest, AveragedOverDays) {
  const auto e = ImportanceScores({{1, 0}, {1, 0}}, {{0, 0}, {1, 0}});
  EXPECT_DOUBLE_EQ(e[0], 0.5);
  EXPECT_DOUBLE_EQ(e[1], 0.0);
}

TEST(ImportanceScoresTest, DiscountFollowsTrueRank) {
  // True ranks: s2 first, s0 second, s1 third; all errors are 1.
  const auto e = ImportanceScores({{2, 0, 3}}, {{1, 1, 2}});
  EXPECT_DOUBLE_EQ(e[2], 1.0);
  EXPECT_DOUBLE_EQ(e[0], 1.0 / std::log2(3.0));
  EXPECT_DOUBLE_EQ(e[1], 1.0 / std::log2(4.0));
}

TEST(ImportanceScoresTest, RejectsMismatch) {
  EXPECT_THROW(ImportanceScores({{1, 0}}, {{0, 0, 0}}), ShapeError);
}

TEST(GaussianSmoothTest, TinyLambdaIsOneHot) {
  const GridDims dims{3, 4};
  V e(12, 0.0);
  e[5] = 2.0;
  const V out = GaussianSmooth(e, 0.01, dims);
  const ImportanceDist p = NormalizeImportance(out);
  for (std::size_t s = 0; s < 12; ++s) {
    EXPECT_DOUBLE_EQ(p.probabilities[s], s == 5 ? 1.0 : 0.0);
  }
}

TEST(GaussianSmoothTest, MatchesDirectSum) {
  Rng rng(501);
  const GridDims dims{4, 5};
  V e(20);
  for (double& v : e) v = rng.Uniform();
  const double lambda = 1.3;
  const V out = GaussianSmooth(e, lambda, dims);
  for (std::size_t u = 0; u < 20; ++u) {
    double expect = 0.0;
    for (std::size_t s = 0; s < 20; ++s) {
      const double dr = double(u / 5) - double(s / 5);
      const double dc = double(u % 5) - double(s % 5);
      expect += e[s] * std::exp(-(dr * dr + dc * dc) / (2 * lambda * lambda)) /
                (2 * std::numbers::pi * lambda * lambda);
    }
    EXPECT_NEAR(out[u], expect, 1e-14);
  }
}

TEST(GaussianSmoothTest, KernelIsSymmetric) {
  const GridDims dims{5, 5};
  for (std::size_t u = 0; u < 25; u += 3) {
    for (std::size_t v = 0; v < 25; v += 4) {
      V eu(25, 0.0), ev(25, 0.0);
      eu[u] = 1.0;
      ev[v] = 1.0;
      EXPECT_DOUBLE_EQ(GaussianSmooth(eu, 1.0, dims)[v],
                       GaussianSmooth(ev, 1.0, dims)[u]);
    }
  }
}

TEST(GaussianSmoothTest, MonotoneInScores) {
  Rng rng(502);
  const GridDims dims{4, 4};
  V e(16);
  for (double& v : e) v = rng.Uniform();
  const V base = GaussianSmooth(e, 1.0, dims);
  e[6] += 0.5;
  const V more = GaussianSmooth(e, 1.0, dims);
  for (std::size_t s = 0; s < 16; ++s) EXPECT_GT(more[s], base[s]);
}

TEST(GaussianSmoothTest, ConstantCancelsInNormalization) {
  Rng rng(503);
  const GridDims dims{3, 3};
  V e(9);
  for (double& v : e) v = rng.Uniform();
  const double lambda = 0.8;
  V unscaled(9, 0.0);
  for (std::size_t u = 0; u < 9; ++u) {
    for (std::size_t s = 0; s < 9; ++s) {
      const double d2 = std::pow(double(u / 3) - double(s / 3), 2) +
                        std::pow(double(u % 3) - double(s % 3), 2);
      unscaled[u] += e[s] * std::exp(-d2 / (2 * lambda * lambda));
    }
  }
  const double total = std::accumulate(unscaled.begin(), unscaled.end(), 0.0);
  const ImportanceDist p = NormalizeImportance(GaussianSmooth(e, lambda, dims));
  for (std::size_t u = 0; u < 9; ++u) {
    EXPECT_NEAR(p.probabilities[u], unscaled[u] / total, 1e-14);
  }
}

TEST(GaussianSmoothTest, RejectsNonPositiveLambda) {
  EXPECT_THROW(GaussianSmooth(V(4, 1.0), 0.0, GridDims{2, 2}), ConfigError);
}

TEST(NormalizeImportanceTest, Examples) {
  EXPECT_EQ(NormalizeImportance(V{1, 3}).probabilities, (V{0.25, 0.75}));
  EXPECT_EQ(NormalizeImportance(V{0, 0, 0, 0}).probabilities,
            (V{0.25, 0.25, 0.25, 0.25}));
  const ImportanceDist d = NormalizeImportance(V{2, 2}, 4, 1.5);
  EXPECT_EQ(d.epoch, 4u);
  EXPECT_EQ(d.lambda, 1.5);
  EXPECT_THROW(NormalizeImportance(V{1, -1}), NumericalError);
  EXPECT_THROW(NormalizeImportance(V{1, NAN}), NumericalError);
}

TEST(ImportanceCsvTest, WritesRowsAndCols) {
  const auto dir = georank::testing::ScratchDir("importance_csv");
  WriteImportanceCsv(ImportanceDist::Uniform(4), GridDims{2, 2},
                     dir / "p.csv");
  std::ifstream in(dir / "p.csv");
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "row,col,probability");
  EXPECT_EQ(first.substr(0, 4), "0,0,");
}

}  // namespace
}  // namespace georank

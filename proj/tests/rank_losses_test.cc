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

#include "georank/rank_losses.h"

#include <cmath>
#include <numeric>

#include "georank/errors.h"
#include "georank/grad_check.h"
#include "gtest/gtest.h"
#include "oracles.h"
#include "test_util.h"

namespace georank {
namespace {

using ad::Shape;
using ad::Tape;
using ad::Tensor;
using ad::Var;
using georank::testing::RandomRelevance;
using georank::testing::RandomScores;
using V = std::vector<double>;
using Idx = std::vector<std::size_t>;

Var Column(Tape& tape, const V& h) {
  return tape.Leaf(Tensor(Shape{h.size(), 1}, h));
}

double Eval(const std::function<Var(Tape&, Var)>& f, const V& h) {
  Tape tape;
  return f(tape, Column(tape, h)).value().item();
}

// Reference objective with explicit loops.
double OracleNdcgSurrogate(const V& y, const V& h, const V& w, double c) {
  Idx all(y.size());
  std::iota(all.begin(), all.end(), 0);
  V sorted = y;
  std::sort(sorted.rbegin(), sorted.rend());
  double z = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    z += (std::pow(2.0, sorted[i]) - 1.0) / std::log2(2.0 + i);
  }
  if (z == 0.0) return 0.0;
  double total = 0.0;
  std::size_t p = 0;
  for (std::size_t s = 0; s < y.size(); ++s) {
    if (y[s] <= 0) continue;
    const double g = oracle::SurrogateRank(h, all, s, c);
    total += w[p++] * (std::pow(2.0, y[s]) - 1.0) / (z * std::log2(g + 1.0));
  }
  return total;
}

double OracleLocalSurrogate(const V& y, const V& h, const V& w, double c,
                            std::size_t rows, std::size_t cols, double R) {
  const std::size_t S = rows * cols;
  double total = 0.0;
  std::size_t p = 0, positives = 0;
  for (std::size_t s = 0; s < S; ++s) positives += y[s] > 0;
  if (positives == 0) return 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    if (y[s] <= 0) continue;
    Idx nb;
    V ly;
    for (std::size_t u = 0; u < S; ++u) {
      const double dr = double(u / cols) - double(s / cols);
      const double dc = double(u % cols) - double(s % cols);
      if (std::sqrt(dr * dr + dc * dc) <= R) {
        nb.push_back(u);
        ly.push_back(y[u]);
      }
    }
    std::sort(ly.rbegin(), ly.rend());
    double z = 0.0;
    for (std::size_t i = 0; i < ly.size(); ++i) {
      z += (std::pow(2.0, ly[i]) - 1.0) / std::log2(2.0 + i);
    }
    double inner = 0.0;
    for (std::size_t u : nb) {
      if (y[u] <= 0) continue;
      const double g = oracle::SurrogateRank(h, nb, u, c);
      inner += (std::pow(2.0, y[u]) - 1.0) / (z * std::log2(g + 1.0));
    }
    total += w[p++] * inner;
  }
  return total / static_cast<double>(positives);
}

TEST(SurrogateRankTest, Examples) {
  Tape tape;
  const Var one = Column(tape, V{0.3});
  EXPECT_DOUBLE_EQ(SurrogateRank(one, Idx{0}, 0, 1.0).value().item(), 1.0);
  const Var two = Column(tape, V{0.5, 0.5});
  EXPECT_DOUBLE_EQ(SurrogateRank(two, Idx{0, 1}, 0, 1.0).value().item(), 2.0);
  EXPECT_DOUBLE_EQ(SurrogateRank(two, Idx{0, 1}, 1, 1.0).value().item(), 2.0);
  // h(s') - h(s) = -c: hinge boundary, only the self term remains.
  const Var edge = Column(tape, V{2.0, 1.0});
  EXPECT_DOUBLE_EQ(SurrogateRank(edge, Idx{0, 1}, 0, 1.0).value().item(), 1.0);
  EXPECT_THROW(SurrogateRank(edge, Idx{1}, 0, 1.0), ConfigError);
}

TEST(SurrogateRankTest, HingeBoundaryHasZeroDerivative) {
  Tape tape;
  const Var h = Column(tape, V{2.0, 1.0});
  tape.Backward(SurrogateRank(h, Idx{0, 1}, 0, 1.0));
  const Tensor g = tape.Grad(h);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 0.0);
}

TEST(SurrogateRankTest, BoundsTrueRankFromAbove) {
  Rng rng(201);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t S = 1 + rng.Index(25);
    const V h = RandomScores(rng, S);
    Idx all(S);
    std::iota(all.begin(), all.end(), 0);
    Tape tape;
    const Var hv = Column(tape, h);
    const Tensor g = SurrogateRanks(hv, all, all, 1.0).value();
    for (std::size_t s = 0; s < S; ++s) {
      EXPECT_GE(g[s], static_cast<double>(oracle::Rank(h, s)) - 1e-12);
      EXPECT_NEAR(g[s], oracle::SurrogateRank(h, all, s, 1.0), 1e-12);
    }
  }
}

TEST(NdcgSurrogateTest, UniqueMaximumByMarginGivesOne) {
  const V y = {0, 3, 0, 0};
  const V h = {0.1, 2.5, -0.3, 1.5};
  const double v = Eval(
      [&](Tape&, Var hv) {
        return NdcgSurrogate(y, hv, PositiveSet(y), V{1.0}, 1.0);
      },
      h);
  EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(NdcgSurrogateTest, MatchesOracleWithWeights) {
  Rng rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t S = 2 + rng.Index(24);
    const V y = RandomRelevance(rng, S);
    const V h = RandomScores(rng, S);
    V w(PositiveSet(y).size());
    for (double& x : w) x = rng.Uniform(0.0, 2.0);
    const double c = rng.Uniform(0.0, 2.0);
    const double got = Eval(
        [&](Tape&, Var hv) { return NdcgSurrogate(y, hv, PositiveSet(y), w, c); },
        h);
    EXPECT_NEAR(got, OracleNdcgSurrogate(y, h, w, c), 1e-12);
  }
}

TEST(NdcgSurrogateTest, BelowExactUncutNdcg) {
  Rng rng(203);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t S = 2 + rng.Index(24);
    const V y = RandomRelevance(rng, S);
    const V h = RandomScores(rng, S);
    const auto exact = NdcgAtK(y, h, S);
    if (!exact) continue;
    const V w(PositiveSet(y).size(), 1.0);
    const double v = Eval(
        [&](Tape&, Var hv) { return NdcgSurrogate(y, hv, PositiveSet(y), w, 1.0); },
        h);
    EXPECT_LE(v, *exact + 1e-12);
  }
}

TEST(NdcgSurrogateTest, TranslationInvariant) {
  Rng rng(204);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t S = 2 + rng.Index(20);
    const V y = RandomRelevance(rng, S);
    const V h = RandomScores(rng, S);
    V shifted = h;
    for (double& v : shifted) v += 3.0;
    const V w(PositiveSet(y).size(), 1.0);
    auto f = [&](Tape&, Var hv) {
      return NdcgSurrogate(y, hv, PositiveSet(y), w, 1.0);
    };
    EXPECT_NEAR(Eval(f, h), Eval(f, shifted), 1e-12);
  }
}

TEST(NdcgSurrogateTest, NoPositivesGivesZero) {
  const V y(5, 0.0);
  EXPECT_EQ(Eval([&](Tape&, Var hv) { return NdcgSurrogate(y, hv, Idx{}, V{}, 1.0); },
                 V{1, 2, 3, 4, 5}),
            0.0);
}

TEST(LocalSurrogateTest, MatchesOracle) {
  Rng rng(205);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = 1 + rng.Index(5), cols = 1 + rng.Index(5);
    const std::size_t S = rows * cols;
    const V y = RandomRelevance(rng, S);
    const V h = RandomScores(rng, S);
    V w(PositiveSet(y).size());
    for (double& x : w) x = rng.Uniform(0.0, 2.0);
    const double R = static_cast<double>(rng.Index(3));
    const NeighborhoodTable table(GridDims{rows, cols}, R);
    const double got = Eval(
        [&](Tape&, Var hv) {
          return LocalNdcgSurrogate(y, hv, PositiveSet(y), w, 1.0, table);
        },
        h);
    EXPECT_NEAR(got, OracleLocalSurrogate(y, h, w, 1.0, rows, cols, R), 1e-12);
  }
}

TEST(LocalSurrogateTest, ZeroRadiusGivesOne) {
  Rng rng(206);
  const V y = {0, 2, 1, 0, 0, 3, 0, 0, 1};
  const V w(PositiveSet(y).size(), 1.0);
  const NeighborhoodTable table(GridDims{3, 3}, 0.0);
  const double v = Eval(
      [&](Tape&, Var hv) {
        return LocalNdcgSurrogate(y, hv, PositiveSet(y), w, 1.0, table);
      },
      RandomScores(rng, 9));
  EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(LocalSurrogateTest, WholeGridSinglePositiveMatchesGlobal) {
  Rng rng(207);
  for (int trial = 0; trial < 20; ++trial) {
    V y(16, 0.0);
    y[rng.Index(16)] = 1.0 + static_cast<double>(rng.Index(3));
    const V h = RandomScores(rng, 16);
    const V w = {1.0};
    const NeighborhoodTable table(GridDims{4, 4}, 10.0);
    auto local = [&](Tape&, Var hv) {
      return LocalNdcgSurrogate(y, hv, PositiveSet(y), w, 1.0, table);
    };
    auto global = [&](Tape&, Var hv) {
      return NdcgSurrogate(y, hv, PositiveSet(y), w, 1.0);
    };
    EXPECT_NEAR(Eval(local, h), Eval(global, h), 1e-12);
  }
}

TEST(LocalSurrogateTest, AllZeroDayGivesZero) {
  const NeighborhoodTable table(GridDims{2, 2}, 1.0);
  const V y(4, 0.0);
  EXPECT_EQ(Eval([&](Tape&, Var hv) {
                   return LocalNdcgSurrogate(y, hv, Idx{}, V{}, 1.0, table);
                 },
                 V{1, 2, 3, 4}),
            0.0);
}

TEST(HybridTest, SigmaEndpointsAndLinearity) {
  Rng rng(208);
  const GridDims dims{4, 4};
  const NeighborhoodTable table(dims, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const V y = RandomRelevance(rng, 16);
    const V h = RandomScores(rng, 16);
    const V w(PositiveSet(y).size(), 1.0);
    const double a = Eval(
        [&](Tape&, Var hv) { return NdcgSurrogate(y, hv, PositiveSet(y), w, 1.0); },
        h);
    const double b = Eval(
        [&](Tape&, Var hv) {
          return LocalNdcgSurrogate(y, hv, PositiveSet(y), w, 1.0, table);
        },
        h);
    for (double sigma : {0.0, 0.1, 0.5, 1.0}) {
      SurrogateConfig config;
      config.sigma = sigma;
      const double v = Eval(
          [&](Tape&, Var hv) { return HybridObjective(y, hv, config, w, table); },
          h);
      if (sigma == 0.0) {
        EXPECT_EQ(v, a);
      }
      if (sigma == 1.0) {
        EXPECT_EQ(v, b);
      }
      EXPECT_NEAR(v, (1 - sigma) * a + sigma * b, 1e-12);
    }
  }
}

TEST(HybridTest, GradientsMatchFiniteDifferences) {
  Rng rng(209);
  ad::GradCheckOptions options;
  options.tolerance = 1e-4;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = 1 + rng.Index(5), cols = 1 + rng.Index(5);
    const std::size_t S = rows * cols;
    const V y = RandomRelevance(rng, S);
    const V w(PositiveSet(y).size(), 1.0);
    SurrogateConfig config;
    config.sigma = rng.Uniform();
    const NeighborhoodTable table(GridDims{rows, cols}, config.radius);
    const auto report = ad::GradCheck(
        [&](Tape&, std::span<const Var> p) {
          return HybridObjective(y, p[0], config, w, table);
        },
        {Tensor(Shape{S, 1}, RandomScores(rng, S))}, options);
    EXPECT_TRUE(report.passed) << "trial " << trial << " err "
                               << report.max_relative_error;
  }
}

TEST(ImportanceWeightsTest, UniformWeightModeIsExactlyOne) {
  Rng rng(210);
  for (std::size_t S : {7u, 63u, 64u, 100u}) {
    const V P(S, 1.0 / static_cast<double>(S));
    V y = RandomRelevance(rng, S);
    y[0] = 1.0;
    const Idx pos = PositiveSet(y);
    double total = 0.0;
    for (double p : P) total += p;
    if (std::abs(total - 1.0) > 1e-9) continue;
    for (double w : ApplyImportance(pos, P, WeightMode::kWeight, 0.5, rng)) {
      EXPECT_EQ(w, 1.0);
    }
  }
}

TEST(ImportanceWeightsTest, WeightModeFormula) {
  Rng rng(211);
  const V P = {0.1, 0.2, 0.3, 0.4};
  const Idx pos = {1, 3};
  const V w = ApplyImportance(pos, P, WeightMode::kWeight, 0.5, rng);
  EXPECT_NEAR(w[0], 0.2 * 2 / 0.6, 1e-15);
  EXPECT_NEAR(w[1], 0.4 * 2 / 0.6, 1e-15);
}

TEST(ImportanceWeightsTest, PointMassSamplesOnlyThatLocation) {
  Rng rng(212);
  V P(10, 0.0);
  P[4] = 1.0;
  const Idx pos = {1, 4, 6, 9};
  for (int i = 0; i < 100; ++i) {
    const V w = ApplyImportance(pos, P, WeightMode::kSample, 0.25, rng);
    EXPECT_EQ(w, (V{0, 1, 0, 0}));
  }
}

TEST(ImportanceWeightsTest, SampleCountIsCeilOfFraction) {
  Rng rng(213);
  const V P(10, 0.1);
  const Idx pos = {0, 1, 2, 3, 4, 5, 6};
  for (double frac : {0.1, 0.5, 0.72, 1.0}) {
    const V w = ApplyImportance(pos, P, WeightMode::kSample, frac, rng);
    const double picked = std::accumulate(w.begin(), w.end(), 0.0);
    EXPECT_EQ(picked, std::ceil(frac * 7.0)) << frac;
  }
}

TEST(ImportanceWeightsTest, SingleDrawFrequenciesMatchP) {
  Rng rng(214);
  const V P = {0.05, 0.3, 0.1, 0.15, 0.2, 0.2};
  const Idx pos = {1, 2, 4, 5};
  double mass = 0.0;
  for (std::size_t s : pos) mass += P[s];
  V freq(pos.size(), 0.0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    // fraction 1/4 of 4 positives: one draw.
    const V w = ApplyImportance(pos, P, WeightMode::kSample, 0.25, rng);
    for (std::size_t j = 0; j < w.size(); ++j) freq[j] += w[j];
  }
  double l1 = 0.0;
  for (std::size_t j = 0; j < pos.size(); ++j) {
    l1 += std::abs(freq[j] / draws - P[pos[j]] / mass);
  }
  EXPECT_LE(l1, 0.05);
}

TEST(ImportanceWeightsTest, RejectsInvalidDistribution) {
  Rng rng(215);
  EXPECT_THROW(ApplyImportance(Idx{0}, V{0.5, 0.4}, WeightMode::kWeight, 0.5, rng),
               ConfigError);
  EXPECT_THROW(ApplyImportance(Idx{0}, V{1.5, -0.5}, WeightMode::kWeight, 0.5, rng),
               ConfigError);
}

TEST(SurrogateConfigTest, Validation) {
  SurrogateConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.sigma = 1.5;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = {};
  c.margin = -1.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  EXPECT_EQ(ParseWeightMode("weight"), WeightMode::kWeight);
  EXPECT_THROW(ParseWeightMode("both"), ConfigError);
}

}  // namespace
}  // namespace georank

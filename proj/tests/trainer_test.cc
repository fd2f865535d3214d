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

#include "georank/trainer.h"

#include <cmath>

#include "georank/adjacency.h"
#include "georank/errors.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace georank {
namespace {

using ad::Shape;
using ad::Tape;
using ad::Tensor;

ModelConfig TinyModel() {
  ModelConfig c;
  c.hidden = 4;
  c.recurrent_hidden = 4;
  c.layers = 1;
  c.window = 3;
  c.embedding_dim = 3;
  c.seed = 2;
  return c;
}

TrainConfig TinyTrain() {
  TrainConfig c;
  c.epochs = 3;
  c.warmup_epochs = 1;
  c.lr_main = 1e-3;
  c.batch_size = 4;
  c.eval_k = 3;
  c.seed = 5;
  return c;
}

struct TinyData {
  StGrid grid = GenerateSynthetic(9, 4, 4, 30, 2);
  Splits splits = ChronologicalSplit(30);
};

TEST(AdamTest, FirstStepMovesByLearningRate) {
  Adam adam;
  Tensor w(Shape{1}, 1.0);
  adam.Step({&w}, {Tensor(Shape{1}, 1.0)}, 0.1);
  EXPECT_NEAR(w[0], 0.9, 1e-8);
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(AdamTest, ZeroGradientLeavesParams) {
  Adam adam;
  Tensor w(Shape{2, 2}, 0.7);
  for (int i = 0; i < 5; ++i) adam.Step({&w}, {Tensor(Shape{2, 2}, 0.0)}, 0.1);
  for (double v : w.values()) EXPECT_EQ(v, 0.7);
}

TEST(AdamTest, ShapeMismatchThrows) {
  Adam adam;
  Tensor w(Shape{2}, 0.0);
  EXPECT_THROW(adam.Step({&w}, {Tensor(Shape{3}, 0.0)}, 0.1), ShapeError);
}

TEST(WarmupLossTest, Examples) {
  Tape tape;
  const auto zeros = tape.Leaf(Tensor(Shape{2, 1}, 0.0));
  EXPECT_NEAR(WarmupLoss(std::vector<double>{1, 0}, zeros, WarmupMode::kBce)
                  .value()
                  .item(),
              std::log(2.0), 1e-15);
  const auto h = tape.Leaf(Tensor(Shape{2, 1}, {1.0, 3.0}));
  EXPECT_DOUBLE_EQ(
      WarmupLoss(std::vector<double>{2, 1}, h, WarmupMode::kMse).value().item(),
      2.5);
}

TEST(HistoricalAverageTest, MeanOverTrainingPeriods) {
  // 1 x 2 grid, 4 periods, risk [t][s].
  GridShape shape{GridDims{1, 2}, 4, 1, 1, 1};
  StGrid grid(shape, std::vector<double>(4, 0.0), std::vector<double>(2, 0.0),
              std::vector<double>(8, 0.0), {1, 0, 3, 2, 9, 9, 9, 9});
  const auto ha = HistoricalAverage(grid, Splits{2});
  EXPECT_EQ(ha, (std::vector<double>{2.0, 1.0}));
}

TEST(TrainTest, ZeroEpochsKeepsInitialParams) {
  TinyData d;
  TrainConfig tc = TinyTrain();
  tc.epochs = 0;
  tc.warmup_epochs = 0;
  const TrainState s = Train(d.grid, d.splits, TinyModel(), tc);
  EXPECT_TRUE(s.params == ModelParams::Init(TinyModel(),
                                            ModelDims::FromGrid(d.grid)));
  EXPECT_TRUE(s.log.empty());
  EXPECT_EQ(s.best_epoch, 0u);
}

TEST(TrainTest, Deterministic) {
  TinyData d;
  const TrainState a = Train(d.grid, d.splits, TinyModel(), TinyTrain());
  const TrainState b = Train(d.grid, d.splits, TinyModel(), TinyTrain());
  EXPECT_TRUE(a.params == b.params);
  EXPECT_EQ(TrainLogCsv(a.log, 3, false), TrainLogCsv(b.log, 3, false));
  EXPECT_EQ(a.importance.probabilities, b.importance.probabilities);
}

TEST(TrainTest, ThreadCountDoesNotChangeResults) {
  TinyData d;
  TrainConfig tc = TinyTrain();
  const TrainState one = Train(d.grid, d.splits, TinyModel(), tc);
  tc.threads = 2;
  const TrainState two = Train(d.grid, d.splits, TinyModel(), tc);
  EXPECT_TRUE(one.params == two.params);
  EXPECT_EQ(TrainLogCsv(one.log, 3, false), TrainLogCsv(two.log, 3, false));
}

TEST(TrainTest, UniformWeightsMatchDisabledImportance) {
  // The first main epoch still sees a uniform P.
  TinyData d;
  TrainConfig tc = TinyTrain();
  tc.epochs = 2;
  tc.surrogate.weight_mode = WeightMode::kWeight;
  const TrainState with = Train(d.grid, d.splits, TinyModel(), tc);
  tc.importance = false;
  const TrainState without = Train(d.grid, d.splits, TinyModel(), tc);
  EXPECT_TRUE(with.params == without.params);
}

TEST(TrainTest, BestSnapshotDominatesLog) {
  TinyData d;
  TrainConfig tc = TinyTrain();
  tc.epochs = 4;
  const TrainState s = Train(d.grid, d.splits, TinyModel(), tc);
  ASSERT_EQ(s.log.size(), 4u);
  for (const EpochLog& e : s.log) EXPECT_LE(e.val_ndcg, s.best_val);
  if (s.best_epoch > 0) {
    EXPECT_EQ(s.log[s.best_epoch - 1].val_ndcg, s.best_val);
  }
  const Tensor a = PearsonStatic(d.grid, d.splits.train_end);
  const auto windows = ValidationWindows(d.grid, 3, d.splits);
  const RankingReport r = MetricReport(
      d.grid, PredictWindows(s.best, d.grid, a, windows), std::vector<std::size_t>{3}, 2.0);
  EXPECT_DOUBLE_EQ(r.Find("ndcg", 3)->mean, s.best_val);
}

TEST(TrainTest, ImportanceStaysADistribution) {
  TinyData d;
  std::size_t calls = 0;
  TrainHooks hooks;
  hooks.on_epoch = [&](const TrainState& s) {
    ++calls;
    double total = 0.0;
    for (double p : s.importance.probabilities) {
      EXPECT_GE(p, 0.0);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  };
  Train(d.grid, d.splits, TinyModel(), TinyTrain(), hooks);
  EXPECT_EQ(calls, 3u);
}

TEST(TrainTest, PatienceStopsEarly) {
  TinyData d;
  TrainConfig tc = TinyTrain();
  tc.epochs = 30;
  tc.patience = 1;
  tc.lr_main = 1e-15;
  tc.warmup_epochs = 0;
  const TrainState s = Train(d.grid, d.splits, TinyModel(), tc);
  EXPECT_LT(s.log.size(), 30u);
}

TEST(TrainConfigTest, ValidationAndJson) {
  TrainConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.warmup_epochs = 200;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = {};
  c.batch_size = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = TinyTrain();
  c.surrogate.sigma = 0.3;
  const TrainConfig back = TrainConfigFromJson(TrainConfigToJson(c));
  EXPECT_EQ(TrainConfigToJson(back), TrainConfigToJson(c));
  nlohmann::json j = TrainConfigToJson(c);
  j["surrogate"]["sigmaa"] = 0.2;
  EXPECT_THROW(TrainConfigFromJson(j), ConfigError);
}

TEST(TrainLogTest, HeaderColumns) {
  const std::string csv = TrainLogCsv({EpochLog{1, 0.5, 0.1, 0.2, 0.3, 1.0, true}}, 10);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "epoch,phase,train_obj,val_ndcg@10,val_lndcg@10,val_prec@10,wall_time_s");
}

}  // namespace
}  // namespace georank

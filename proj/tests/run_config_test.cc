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

#include "georank/run_config.h"

#include <fstream>

#include "georank/errors.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace georank {
namespace {

using nlohmann::json;

TEST(RunConfigTest, DefaultsRoundTrip) {
  const RunConfig c;
  const json j = RunConfigToJson(c);
  EXPECT_EQ(RunConfigToJson(RunConfigFromJson(j)), j);
  EXPECT_EQ(j["eval"]["ks"], json({5, 10, 20}));
  EXPECT_EQ(j["train"]["surrogate"]["sigma"], 0.1);
}

TEST(RunConfigTest, PartialConfigKeepsDefaults) {
  const RunConfig c = RunConfigFromJson(json::parse(
      R"({"train": {"epochs": 7, "warmup_epochs": 2, "surrogate": {"sigma": 0.0}},
          "eval": {"crossk": {"envelope": "quantile"}}})"));
  EXPECT_EQ(c.train.epochs, 7u);
  EXPECT_EQ(c.train.surrogate.sigma, 0.0);
  EXPECT_EQ(c.train.surrogate.margin, 1.0);
  EXPECT_EQ(c.eval.crossk.envelope, "quantile");
  EXPECT_EQ(c.model.hidden, 32u);
}

TEST(RunConfigTest, UnknownKeysRejectedAtEveryLevel) {
  for (const char* text :
       {R"({"epochs": 3})", R"({"train": {"epoch": 3}})",
        R"({"train": {"surrogate": {"sigam": 0.1}}})",
        R"({"model": {"layer": 2}})", R"({"data": {"synthetic": {"row": 4}}})",
        R"({"eval": {"crossk": {"sims": 9}}})"}) {
    EXPECT_THROW(RunConfigFromJson(json::parse(text)), ConfigError) << text;
  }
}

TEST(RunConfigTest, BadValuesRejected) {
  for (const char* text :
       {R"({"train": {"epochs": -1}})", R"({"train": {"surrogate": {"sigma": 2}}})",
        R"({"model": {"beta_mode": "sometimes"}})",
        R"({"eval": {"crossk": {"envelope": "band"}}})",
        R"({"train": {"lr_main": "fast"}})"}) {
    EXPECT_THROW(RunConfigFromJson(json::parse(text)), ConfigError) << text;
  }
}

TEST(RunConfigTest, HashIsStableAndSensitive) {
  RunConfig a, b;
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  EXPECT_EQ(ConfigHash(a).size(), 16u);
  b.train.seed = 1;
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
}

TEST(RunConfigTest, LoadFromFile) {
  const auto dir = georank::testing::ScratchDir("run_config");
  std::ofstream(dir / "c.json") << R"({"output_dir": "x", "train": {"seed": 4}})";
  const RunConfig c = LoadRunConfig(dir / "c.json");
  EXPECT_EQ(c.output_dir, "x");
  EXPECT_EQ(c.train.seed, 4u);
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_THROW(LoadRunConfig(dir / "bad.json"), ConfigError);
  EXPECT_THROW(LoadRunConfig(dir / "absent.json"), ConfigError);
}

}  // namespace
}  // namespace georank

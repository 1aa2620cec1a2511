// Copyright 2026 The refinpaint Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include <gtest/gtest.h>

#include <fstream>

#include "refinpaint/errors.hpp"
#include "refinpaint/train/run_config.hpp"
#include "testing.hpp"

namespace refinpaint {
namespace {

namespace fs = std::filesystem;

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto p = dir / "run.ini";
  std::ofstream(p) << text;
  return p;
}

TEST(RunConfig, PresetDefaults) {
  const auto toy = train::RunConfig::for_preset("toy");
  EXPECT_EQ(toy.batch_size, 4u);
  EXPECT_FALSE(toy.epochs.has_value());
  EXPECT_DOUBLE_EQ(toy.adam.learning_rate, 2e-4);
  EXPECT_EQ(toy.model.preset, "toy");

  const auto full = train::RunConfig::for_preset("full");
  EXPECT_EQ(full.batch_size, 32u);
  ASSERT_TRUE(full.epochs.has_value());
  EXPECT_EQ(*full.epochs, 400u);
  EXPECT_EQ(full.image_size, 256u);
  EXPECT_DOUBLE_EQ(full.adam.learning_rate, 2e-4);
  EXPECT_DOUBLE_EQ(full.adam.beta1, 0.9);
  EXPECT_DOUBLE_EQ(full.adam.beta2, 0.999);
}

TEST(RunConfig, EpochsResolveToSteps) {
  auto c = train::RunConfig::for_preset("toy");
  c.steps = 17;
  EXPECT_EQ(c.resolved_steps(1000), 17u);
  c.batch_size = 32;
  c.epochs = 400;
  EXPECT_EQ(c.resolved_steps(100), 400u * 4);
  EXPECT_EQ(c.resolved_steps(96), 400u * 3);
  EXPECT_EQ(c.resolved_steps(0), 400u);
}

TEST(RunConfig, LoadsFileAndResolvesRelativePaths) {
  const auto dir = testing::scratch_dir("run_config_load");
  std::ofstream(dir / "pairs.jsonl") << "";
  const auto p = write_config(dir,
                              "[run]\nseed = 9\nout_dir = out\n"
                              "[model]\npreset = toy\nvariant = align\n"
                              "[train]\nsteps = 12\nbatch_size = 2\nlearning_rate = 0.001\nimage_size = 64\n"
                              "[data]\nmanifest = pairs.jsonl\n");
  const auto c = train::RunConfig::load(p);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.steps, 12u);
  EXPECT_EQ(c.batch_size, 2u);
  EXPECT_DOUBLE_EQ(c.adam.learning_rate, 1e-3);
  EXPECT_EQ(c.model.variant, model::Variant::kAlign);
  EXPECT_EQ(c.manifest, dir / "pairs.jsonl");
  EXPECT_EQ(c.out_dir, dir / "out");
  EXPECT_NO_THROW(c.validate(true));
}

TEST(RunConfig, PresetOverrideWins) {
  const auto dir = testing::scratch_dir("run_config_override");
  const auto p = write_config(dir, "[model]\npreset = toy\n");
  EXPECT_EQ(train::RunConfig::load(p, std::string("full")).batch_size, 32u);
}

TEST(RunConfig, EveryBadFieldIsReported) {
  const auto dir = testing::scratch_dir("run_config_bad");
  const auto p = write_config(dir,
                              "[run]\nseed = abc\ncolour = red\n"
                              "[train]\nsteps = 1.5\nwarmup = 3\n"
                              "[extras]\nx = 1\n");
  try {
    train::RunConfig::load(p);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const char* needle : {"run.seed", "run.colour", "train.steps", "train.warmup", "[extras]"}) {
      EXPECT_NE(msg.find(needle), std::string::npos) << needle << " missing from:\n" << msg;
    }
  }
}

TEST(RunConfig, ValidationEnumeratesProblems) {
  auto c = train::RunConfig::for_preset("toy");
  c.batch_size = 0;
  c.adam.learning_rate = -1;
  c.adam.beta2 = 1;
  c.image_size = 48;
  c.manifest = "/definitely/not/here.jsonl";
  const auto problems = c.problems(true);
  EXPECT_EQ(problems.size(), 5u);
  try {
    c.validate(true);
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const char* needle :
         {"batch_size", "learning_rate", "beta2", "image_size", "manifest"}) {
      EXPECT_NE(msg.find(needle), std::string::npos) << needle;
    }
  }
  EXPECT_EQ(c.problems(false).size(), 4u);
}

TEST(RunConfig, MissingManifestIsAProblem) {
  const auto c = train::RunConfig::for_preset("toy");
  ASSERT_EQ(c.problems(true).size(), 1u);
  EXPECT_NE(c.problems(true)[0].find("data.manifest"), std::string::npos);
}

TEST(RunConfig, UnreadableFileIsAConfigError) {
  EXPECT_THROW(train::RunConfig::load("/no/such/run.ini"), ConfigError);
  const auto dir = testing::scratch_dir("run_config_preset");
  EXPECT_THROW(train::RunConfig::load(write_config(dir, "[model]\npreset = huge\n")), ConfigError);
}

}  // namespace
}  // namespace refinpaint

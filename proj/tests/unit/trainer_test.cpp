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
#include <sstream>

#include "grad_cases.hpp"
#include "mining_corpus.hpp"
#include "refinpaint/errors.hpp"
#include "refinpaint/tensor/checkpoint.hpp"
#include "refinpaint/train/trainer.hpp"

namespace refinpaint {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

train::RunConfig tiny_run(const fs::path& manifest, const fs::path& out) {
  auto c = train::RunConfig::for_preset("toy");
  c.model = testing::tiny_model_config();
  c.image_size = 32;
  c.batch_size = 2;
  c.steps = 4;
  c.checkpoint_every = 2;
  c.seed = 5;
  c.manifest = manifest;
  c.out_dir = out;
  return c;
}

class TinyTraining : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root = testing::scratch_dir("trainer");
    manifest = testing::write_training_set(root / "data", 3, 64);
  }
  static inline fs::path root, manifest;
};

TEST_F(TinyTraining, WritesLogAndCheckpoints) {
  const auto cfg = tiny_run(manifest, root / "run_a");
  std::vector<train::StepLog> seen;
  const auto summary = train::run_training(cfg, [&](const train::StepLog& s) { seen.push_back(s); });
  EXPECT_EQ(summary.steps, 4u);
  ASSERT_EQ(seen.size(), 4u);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    EXPECT_EQ(seen[i].step, i + 1);
    const auto& s = seen[i];
    const auto w = cfg.loss_weights;
    EXPECT_NEAR(s.joint, w.l1 * s.l1 + w.perceptual * s.perceptual + w.style * s.style,
                1e-5 * std::max(1.0, s.joint));
  }
  std::ifstream log(cfg.out_dir / "loss_log.csv");
  std::string line;
  std::getline(log, line);
  EXPECT_EQ(line, "step,l1,perceptual,style,joint");
  std::size_t rows = 0;
  while (std::getline(log, line)) ++rows;
  EXPECT_EQ(rows, 4u);
  EXPECT_TRUE(fs::exists(cfg.out_dir / "checkpoints" / "step_000002.trkt"));
  EXPECT_TRUE(fs::exists(cfg.out_dir / "checkpoints" / "step_000004.trkt"));
  EXPECT_TRUE(fs::exists(cfg.out_dir / "final.trkt"));
  EXPECT_TRUE(fs::exists(cfg.out_dir / "model.cfg"));

  // The final checkpoint loads strictly into a fresh model of the saved config.
  model::Inpainter<float> fresh(model::ModelConfig::load(cfg.out_dir / "model.cfg"), 99);
  auto params = fresh.all_parameters();
  EXPECT_NO_THROW(ad::load_parameters(cfg.out_dir / "final.trkt", params, true));
}

TEST_F(TinyTraining, FixedSeedReplaysBitForBit) {
  const auto a = tiny_run(manifest, root / "replay_a");
  auto b = a;
  b.out_dir = root / "replay_b";
  train::run_training(a);
  train::run_training(b);
  EXPECT_EQ(slurp(a.out_dir / "loss_log.csv"), slurp(b.out_dir / "loss_log.csv"));
  EXPECT_EQ(slurp(a.out_dir / "final.trkt"), slurp(b.out_dir / "final.trkt"));
  EXPECT_EQ(slurp(a.out_dir / "checkpoints" / "step_000002.trkt"),
            slurp(b.out_dir / "checkpoints" / "step_000002.trkt"));
}

TEST_F(TinyTraining, DifferentSeedDiverges) {
  auto a = tiny_run(manifest, root / "seed_a");
  auto b = a;
  b.out_dir = root / "seed_b";
  b.seed = 6;
  a.steps = b.steps = 1;
  train::run_training(a);
  train::run_training(b);
  EXPECT_NE(slurp(a.out_dir / "loss_log.csv"), slurp(b.out_dir / "loss_log.csv"));
}

TEST_F(TinyTraining, EpochsCountBatchesPerPass) {
  auto c = tiny_run(manifest, root / "epochs");
  c.epochs = 2;
  // 3 examples at batch 2 make 2 steps per epoch.
  EXPECT_EQ(train::run_training(c).steps, 4u);
}

TEST_F(TinyTraining, StepReducesLossOnAFixedBatch) {
  auto c = tiny_run(manifest, root / "overfit");
  c.adam.learning_rate = 1e-3;
  auto examples = train::load_examples(manifest, 32);
  ASSERT_EQ(examples.size(), 3u);
  data::Mask hole(32, 32);
  for (std::size_t y = 8; y < 20; ++y) {
    for (std::size_t x = 10; x < 24; ++x) hole.at(x, y) = 1;
  }
  examples.resize(1);
  c.batch_size = 1;
  train::Trainer trainer(c, examples, train::make_extractor({}), train::fixed_mask(hole));
  const auto first = trainer.step();
  train::StepLog last;
  for (int i = 0; i < 30; ++i) last = trainer.step();
  EXPECT_LT(last.joint, first.joint);
  EXPECT_EQ(trainer.steps_done(), 31u);
}

TEST(Training, EmptyManifestIsAConfigError) {
  const auto root = testing::scratch_dir("trainer_empty");
  data::write_manifest(root / "manifest.jsonl", {});
  auto c = tiny_run(root / "manifest.jsonl", root / "out");
  EXPECT_THROW(train::run_training(c), ConfigError);
}

}  // namespace
}  // namespace refinpaint

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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "refinpaint/data/image.hpp"
#include "refinpaint/data/masks.hpp"
#include "refinpaint/loss/losses.hpp"
#include "refinpaint/model/inpainter.hpp"
#include "refinpaint/tensor/optim.hpp"
#include "refinpaint/train/run_config.hpp"

namespace refinpaint::train {

struct TrainingExample {
  data::Image target;     // ground truth I
  data::Image reference;  // I_ref
};

struct StepLog {
  std::size_t step = 0;
  double l1 = 0;
  double perceptual = 0;
  double style = 0;
  double joint = 0;
};

// Supplies the hole mask of one example. The default draws a uniformly random
// ratio bin and boundary flag and generates a stroke mask.
using MaskSource = std::function<data::Mask(std::size_t step, std::size_t slot, std::mt19937_64& rng)>;

MaskSource random_stroke_masks(std::size_t size);
// Picks files from an external corpus (bin subdirectories) at random.
MaskSource corpus_masks(const std::filesystem::path& dir, std::size_t size);
// Always the same mask.
MaskSource fixed_mask(data::Mask mask);

// Single-threaded optimisation loop. The loss is the joint objective on the
// raw decoder output against the ground truth.
class Trainer {
 public:
  Trainer(const RunConfig& config, std::vector<TrainingExample> examples,
          std::shared_ptr<const loss::FeatureExtractor<float>> extractor, MaskSource masks);

  StepLog step();
  std::size_t steps_done() const { return steps_done_; }

  model::Inpainter<float>& model() { return model_; }
  const model::Inpainter<float>& model() const { return model_; }

  // Writes <dir>/model.cfg and <dir>/<name>.trkt.
  void save(const std::filesystem::path& dir, const std::string& name) const;

 private:
  RunConfig config_;
  std::vector<TrainingExample> examples_;
  std::shared_ptr<const loss::FeatureExtractor<float>> extractor_;
  MaskSource masks_;
  model::Inpainter<float> model_;
  ad::Adam<float> adam_;
  std::mt19937_64 rng_;
  std::size_t steps_done_ = 0;
};

// CSV with header step,l1,perceptual,style,joint.
class LossLog {
 public:
  explicit LossLog(const std::filesystem::path& path);
  void append(const StepLog& log);

 private:
  std::filesystem::path path_;
};

// Full run: loads the manifest, trains for resolved_steps, writes the loss
// log, periodic checkpoints and the final checkpoint under out_dir.
struct TrainSummary {
  std::size_t steps = 0;
  StepLog first;
  StepLog last;
  std::filesystem::path final_checkpoint;
};

TrainSummary run_training(const RunConfig& config,
                          const std::function<void(const StepLog&)>& on_step = {});

// Loads manifest pairs, downsampled to image_size.
std::vector<TrainingExample> load_examples(const std::filesystem::path& manifest, std::size_t image_size);

std::shared_ptr<const loss::FeatureExtractor<float>> make_extractor(const std::filesystem::path& checkpoint);

}  // namespace refinpaint::train

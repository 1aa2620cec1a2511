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

#include "refinpaint/train/trainer.hpp"

#include <cstdio>
#include <fstream>

#include "refinpaint/data/mining.hpp"
#include "refinpaint/data/png_io.hpp"
#include "refinpaint/errors.hpp"
#include "refinpaint/tensor/checkpoint.hpp"

namespace refinpaint::train {

namespace fs = std::filesystem;

MaskSource random_stroke_masks(std::size_t size) {
  return [size](std::size_t, std::size_t, std::mt19937_64& rng) {
    const auto bin = std::uniform_int_distribution<std::size_t>(0, data::kRatioBins - 1)(rng);
    const bool damaged = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
    data::MaskOptions opt;
    opt.width = opt.height = size;
    return data::gen_irregular_mask(bin, damaged, rng(), opt).mask;
  };
}

MaskSource corpus_masks(const fs::path& dir, std::size_t size) {
  auto entries = std::make_shared<std::vector<data::CorpusEntry>>(data::list_mask_corpus(dir));
  if (entries->empty()) throw FormatError("mask corpus is empty: " + dir.string());
  return [entries, size](std::size_t, std::size_t, std::mt19937_64& rng) {
    const auto bin = std::uniform_int_distribution<std::size_t>(0, data::kRatioBins - 1)(rng);
    std::vector<const data::CorpusEntry*> in_bin;
    for (const auto& e : *entries) {
      if (e.bin == bin) in_bin.push_back(&e);
    }
    const auto& pool = in_bin;
    const data::CorpusEntry* pick =
        pool.empty() ? &(*entries)[std::uniform_int_distribution<std::size_t>(0, entries->size() - 1)(rng)]
                     : pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    auto m = data::read_mask_png(pick->path);
    if (m.width != size) m = data::downsample(m, m.width / size);
    if (m.width != size || m.height != size) {
      throw FormatError("mask " + pick->path.string() + " cannot be resized to the training size");
    }
    return m;
  };
}

MaskSource fixed_mask(data::Mask mask) {
  return [mask = std::move(mask)](std::size_t, std::size_t, std::mt19937_64&) { return mask; };
}

Trainer::Trainer(const RunConfig& config, std::vector<TrainingExample> examples,
                 std::shared_ptr<const loss::FeatureExtractor<float>> extractor, MaskSource masks)
    : config_(config),
      examples_(std::move(examples)),
      extractor_(std::move(extractor)),
      masks_(std::move(masks)),
      model_(config.model, data::mix_seed(config.seed, 1)),
      adam_(model_.parameters(), config.adam),
      rng_(data::mix_seed(config.seed, 2)) {
  config_.validate(false);
  RI_REQUIRE(!examples_.empty(), "training needs at least one example");
  RI_REQUIRE(extractor_ != nullptr, "training needs a feature extractor");
  for (const auto& e : examples_) {
    RI_REQUIRE(e.target.width == config_.image_size && e.target.height == config_.image_size &&
                   e.reference.width == e.target.width && e.reference.height == e.target.height,
               "training examples must be ", config_.image_size, "x", config_.image_size);
  }
}

StepLog Trainer::step() {
  std::vector<ad::Tensor<float>> targets, references, masks;
  for (std::size_t slot = 0; slot < config_.batch_size; ++slot) {
    const auto idx = std::uniform_int_distribution<std::size_t>(0, examples_.size() - 1)(rng_);
    const auto& ex = examples_[idx];
    targets.push_back(data::image_to_tensor<float>(ex.target));
    references.push_back(data::image_to_tensor<float>(ex.reference));
    masks.push_back(data::mask_to_tensor<float>(masks_(steps_done_, slot, rng_)));
  }
  const auto target = data::batch(targets);
  const auto out = model_.inpaint(target, data::batch(masks), data::batch(references));
  const auto loss = loss::joint_loss(out.generated, target, *extractor_, config_.loss_weights);

  adam_.zero_grad();
  loss.total.backward();
  adam_.step();
  ++steps_done_;
  return {steps_done_, loss.l1.item(), loss.perceptual.item(), loss.style.item(), loss.total.item()};
}

void Trainer::save(const fs::path& dir, const std::string& name) const {
  fs::create_directories(dir);
  model_.config().save(dir / "model.cfg");
  ad::save_parameters(dir / (name + ".trkt"), model_.all_parameters());
}

LossLog::LossLog(const fs::path& path) : path_(path) {
  std::ofstream f(path_, std::ios::trunc);
  if (!f) throw FormatError("cannot write loss log " + path_.string());
  f << "step,l1,perceptual,style,joint\n";
}

void LossLog::append(const StepLog& log) {
  std::ofstream f(path_, std::ios::app);
  char line[256];
  std::snprintf(line, sizeof line, "%zu,%.9g,%.9g,%.9g,%.9g\n", log.step, log.l1, log.perceptual, log.style,
                log.joint);
  f << line;
}

std::vector<TrainingExample> load_examples(const fs::path& manifest, std::size_t image_size) {
  const auto records = data::read_manifest(manifest);
  const auto root = manifest.parent_path();
  std::vector<TrainingExample> out;
  for (const auto& r : records) {
    if (r.split == "test") continue;
    TrainingExample ex;
    ex.target = data::read_png_rgb(root / r.input);
    ex.reference = data::read_png_rgb(root / r.reference);
    if (ex.target.width != image_size) {
      RI_REQUIRE(image_size > 0 && ex.target.width % image_size == 0,
                 "crop size ", ex.target.width, " is not a multiple of image_size ", image_size);
      const auto f = ex.target.width / image_size;
      ex.target = data::downsample(ex.target, f);
      ex.reference = data::downsample(ex.reference, f);
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::shared_ptr<const loss::FeatureExtractor<float>> make_extractor(const fs::path& checkpoint) {
  if (checkpoint.empty()) return std::make_shared<loss::ConvPyramidExtractor<float>>();
  return std::make_shared<loss::ConvPyramidExtractor<float>>(
      loss::ConvPyramidExtractor<float>::from_checkpoint(checkpoint));
}

TrainSummary run_training(const RunConfig& config, const std::function<void(const StepLog&)>& on_step) {
  config.validate(true);
  auto examples = load_examples(config.manifest, config.image_size);
  const auto total = config.resolved_steps(examples.size());
  if (examples.empty()) throw ConfigError("manifest " + config.manifest.string() + " has no training pairs");
  MaskSource masks = config.mask_dir.empty() ? random_stroke_masks(config.image_size)
                                             : corpus_masks(config.mask_dir, config.image_size);
  Trainer trainer(config, std::move(examples), make_extractor(config.extractor), masks);

  fs::create_directories(config.out_dir);
  LossLog log(config.out_dir / "loss_log.csv");
  TrainSummary summary;
  summary.steps = total;
  for (std::size_t s = 0; s < total; ++s) {
    const auto entry = trainer.step();
    if (s == 0) summary.first = entry;
    summary.last = entry;
    log.append(entry);
    if (on_step) on_step(entry);
    if (config.checkpoint_every && entry.step % config.checkpoint_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "step_%06zu", entry.step);
      trainer.save(config.out_dir / "checkpoints", name);
    }
  }
  trainer.save(config.out_dir, "final");
  summary.final_checkpoint = config.out_dir / "final.trkt";
  return summary;
}

}  // namespace refinpaint::train

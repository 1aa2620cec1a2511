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
#include <optional>
#include <string>
#include <vector>

#include "refinpaint/loss/losses.hpp"
#include "refinpaint/model/config.hpp"
#include "refinpaint/tensor/optim.hpp"

namespace refinpaint::train {

// Everything a training run needs. Loaded from an INI-style file:
//
//   [run]    seed, out_dir
//   [model]  preset, variant and any ModelConfig key
//   [train]  steps | epochs, batch_size, learning_rate, beta1, beta2, epsilon,
//            checkpoint_every, image_size, loss_l1, loss_perceptual, loss_style
//   [data]   manifest, mask_dir, extractor
struct RunConfig {
  model::ModelConfig model = model::ModelConfig::toy();
  ad::AdamOptions adam;
  loss::LossWeights loss_weights;

  std::size_t batch_size = 4;
  std::size_t steps = 300;
  // When set, steps = epochs * ceil(dataset / batch_size).
  std::optional<std::size_t> epochs;
  std::size_t checkpoint_every = 100;
  std::size_t image_size = 64;

  std::filesystem::path manifest;
  std::filesystem::path mask_dir;   // optional external corpus
  std::filesystem::path extractor;  // optional feature extractor checkpoint

  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "runs/default";

  // Defaults for a preset: toy uses batch 4 and 300 steps; full uses batch
  // 32 and 400 epochs at 256 x 256.
  static RunConfig for_preset(const std::string& preset);
  // Reads the file on top of the preset named in [model] preset (or
  // `preset_override` when given). Throws ConfigError listing every bad field.
  static RunConfig load(const std::filesystem::path& path,
                        const std::optional<std::string>& preset_override = std::nullopt);

  // Every problem found; checks paths when `check_paths`.
  std::vector<std::string> problems(bool check_paths = true) const;
  void validate(bool check_paths = true) const;

  std::size_t resolved_steps(std::size_t dataset_size) const;
};

}  // namespace refinpaint::train

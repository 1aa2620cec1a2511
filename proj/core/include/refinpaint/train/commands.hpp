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
#include <iosfwd>
#include <optional>

#include "refinpaint/data/mining.hpp"
#include "refinpaint/metrics/evaluate.hpp"
#include "refinpaint/train/trainer.hpp"

// Library side of the command-line tool. Each command reports progress to
// `log`. Bad user input (missing directories, empty inputs, invalid config)
// raises ConfigError; everything else propagates as a runtime failure.
namespace refinpaint::train {

struct MineArgs {
  std::filesystem::path dir_a;
  std::filesystem::path dir_b;
  std::filesystem::path out_dir;
  data::MiningOptions options;
};
data::MiningReport cmd_mine(const MineArgs& args, std::ostream& log);

struct MasksArgs {
  std::filesystem::path out_dir;
  std::size_t per_bin_count = 10;
  std::uint64_t seed = 0;
  std::size_t size = 256;
};
std::vector<std::filesystem::path> cmd_masks(const MasksArgs& args, std::ostream& log);

TrainSummary cmd_train(const RunConfig& config, std::ostream& log);

struct InferArgs {
  std::filesystem::path checkpoint;
  // Defaults to model.cfg next to the checkpoint.
  std::filesystem::path model_config;
  std::filesystem::path input;
  std::filesystem::path mask;
  std::filesystem::path reference;
  std::filesystem::path output;
  std::filesystem::path grid;          // optional side-by-side image
  std::filesystem::path ground_truth;  // optional last grid panel
};
data::Image cmd_infer(const InferArgs& args, std::ostream& log);

struct EvalArgs {
  std::filesystem::path pred_dir;
  std::filesystem::path gt_dir;
  std::filesystem::path mask_dir;
  std::filesystem::path out_dir;
  std::filesystem::path extractor;
};
metrics::EvalReport cmd_eval(const EvalArgs& args, std::ostream& log);

}  // namespace refinpaint::train

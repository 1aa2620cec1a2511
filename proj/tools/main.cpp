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

// refinpaint: mine | masks | train | infer | eval
//
// Exit status: 0 success, 1 runtime failure, 2 usage or configuration error,
// 3 eval finished but skipped orphan files.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "refinpaint/errors.hpp"
#include "refinpaint/train/commands.hpp"

namespace fs = std::filesystem;
using namespace refinpaint;

namespace {

constexpr int kUsage = 2;
constexpr int kWarning = 3;
constexpr int kRuntime = 1;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string preset;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--out", c.out, "Output directory or file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reference-guided image inpainting toolkit"};
  app.require_subcommand(1);

  Common common;

  train::MineArgs mine;
  std::string mine_a, mine_b;
  auto* mine_cmd = app.add_subcommand("mine", "Mine aligned input/reference crops from two image directories");
  add_common(mine_cmd, common);
  mine_cmd->add_option("dir_a", mine_a, "First view directory")->required();
  mine_cmd->add_option("dir_b", mine_b, "Second view directory")->required();
  mine_cmd->add_option("--crop-size", mine.options.crop.crop_size, "Crop side in pixels");
  mine_cmd->add_option("--min-matches", mine.options.crop.min_matches, "Minimum accepted matches");
  mine_cmd->add_option("--consistency-radius", mine.options.crop.consistency_radius,
                       "Drop matches farther than this from the median displacement (0 keeps all)");
  mine_cmd->add_option("--ratio", mine.options.match.ratio, "Nearest/second-nearest ratio threshold");
  mine_cmd->add_flag("--absolute", mine.options.match.absolute, "Filter by absolute descriptor distance");
  mine_cmd->add_option("--max-distance", mine.options.match.max_distance, "Absolute distance threshold");
  mine_cmd->add_flag("--cross-check", mine.options.match.cross_check, "Keep mutual nearest neighbours only");
  mine_cmd->add_option("--test-fraction", mine.options.test_fraction, "Fraction of sources held out");

  train::MasksArgs masks;
  auto* masks_cmd = app.add_subcommand("masks", "Generate an irregular mask corpus");
  add_common(masks_cmd, common);
  masks_cmd->add_option("--count", masks.per_bin_count, "Masks per ratio bin");
  masks_cmd->add_option("--size", masks.size, "Mask side in pixels");

  auto* train_cmd = app.add_subcommand("train", "Train a model");
  add_common(train_cmd, common);
  train_cmd->add_option("--config", common.config, "Run configuration (INI)");
  train_cmd->add_option("--preset", common.preset, "Model preset")->check(CLI::IsMember({"toy", "full"}));
  std::string manifest;
  std::optional<std::size_t> steps;
  train_cmd->add_option("--manifest", manifest, "Training manifest (overrides the config)");
  train_cmd->add_option("--steps", steps, "Optimisation steps (overrides the config)");

  train::InferArgs infer;
  std::string infer_ckpt, infer_input, infer_mask, infer_ref, infer_grid, infer_gt, infer_cfg;
  auto* infer_cmd = app.add_subcommand("infer", "Inpaint one image");
  add_common(infer_cmd, common);
  infer_cmd->add_option("checkpoint", infer_ckpt, "Parameter checkpoint (.trkt)")->required();
  infer_cmd->add_option("input", infer_input, "Input image")->required();
  infer_cmd->add_option("mask", infer_mask, "Hole mask (white = missing)")->required();
  infer_cmd->add_option("reference", infer_ref, "Reference image")->required();
  infer_cmd->add_option("--grid", infer_grid, "Also write reference | input | output [| gt]");
  infer_cmd->add_option("--gt", infer_gt, "Ground truth for the grid");
  infer_cmd->add_option("--model-config", infer_cfg, "Model config (default: model.cfg beside the checkpoint)");

  train::EvalArgs eval;
  std::string eval_pred, eval_gt, eval_masks, eval_fx;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth per mask-ratio bin");
  add_common(eval_cmd, common);
  eval_cmd->add_option("pred", eval_pred, "Predictions directory")->required();
  eval_cmd->add_option("gt", eval_gt, "Ground truth directory")->required();
  eval_cmd->add_option("masks", eval_masks, "Mask directory")->required();
  eval_cmd->add_option("--extractor", eval_fx, "Feature extractor checkpoint");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (mine_cmd->parsed()) {
      mine.dir_a = mine_a;
      mine.dir_b = mine_b;
      mine.out_dir = common.out.empty() ? "mined" : common.out;
      if (common.seed) mine.options.seed = *common.seed;
      train::cmd_mine(mine, std::cout);
    } else if (masks_cmd->parsed()) {
      masks.out_dir = common.out.empty() ? "masks" : common.out;
      if (common.seed) masks.seed = *common.seed;
      train::cmd_masks(masks, std::cout);
    } else if (train_cmd->parsed()) {
      std::optional<std::string> preset;
      if (!common.preset.empty()) preset = common.preset;
      auto cfg = common.config.empty() ? train::RunConfig::for_preset(preset.value_or("toy"))
                                       : train::RunConfig::load(common.config, preset);
      if (common.seed) cfg.seed = *common.seed;
      if (!common.out.empty()) cfg.out_dir = common.out;
      if (!manifest.empty()) cfg.manifest = manifest;
      if (steps) {
        cfg.steps = *steps;
        cfg.epochs.reset();
      }
      train::cmd_train(cfg, std::cout);
    } else if (infer_cmd->parsed()) {
      infer.checkpoint = infer_ckpt;
      infer.model_config = infer_cfg;
      infer.input = infer_input;
      infer.mask = infer_mask;
      infer.reference = infer_ref;
      infer.grid = infer_grid;
      infer.ground_truth = infer_gt;
      infer.output = common.out.empty() ? "output.png" : common.out;
      train::cmd_infer(infer, std::cout);
    } else if (eval_cmd->parsed()) {
      eval.pred_dir = eval_pred;
      eval.gt_dir = eval_gt;
      eval.mask_dir = eval_masks;
      eval.extractor = eval_fx;
      eval.out_dir = common.out;
      const auto report = train::cmd_eval(eval, std::cout);
      if (!report.orphans.empty()) return kWarning;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return 0;
}

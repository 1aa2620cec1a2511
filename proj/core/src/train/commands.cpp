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

#include "refinpaint/train/commands.hpp"

#include <ostream>

#include "refinpaint/data/png_io.hpp"
#include "refinpaint/errors.hpp"
#include "refinpaint/tensor/checkpoint.hpp"

namespace refinpaint::train {

namespace fs = std::filesystem;

namespace {

void require_dir(const fs::path& dir, const char* role) {
  if (dir.empty() || !fs::is_directory(dir)) {
    throw ConfigError(std::string(role) + " directory does not exist: " + dir.string());
  }
}

void require_file(const fs::path& file, const char* role) {
  if (file.empty() || !fs::is_regular_file(file)) {
    throw ConfigError(std::string(role) + " file does not exist: " + file.string());
  }
}

std::size_t count_pngs(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") ++n;
  }
  return n;
}

}  // namespace

data::MiningReport cmd_mine(const MineArgs& args, std::ostream& log) {
  require_dir(args.dir_a, "first source");
  require_dir(args.dir_b, "second source");
  if (count_pngs(args.dir_a) == 0 || count_pngs(args.dir_b) == 0) {
    throw ConfigError("source directories contain no PNG images");
  }
  auto report = data::mine_directories(args.dir_a, args.dir_b, args.out_dir, args.options);
  if (report.sources == 0) throw ConfigError("no filenames shared between the source directories");
  log << "sources " << report.sources << ", candidates " << report.candidates << ", accepted "
      << report.records.size() << "\n";
  for (const auto& [reason, n] : report.rejections) log << "rejected (" << reason << ") " << n << "\n";
  if (report.records.empty()) log << "warning: no pair was accepted\n";
  for (const auto& w : report.warnings) log << "warning: " << w << "\n";
  return report;
}

std::vector<fs::path> cmd_masks(const MasksArgs& args, std::ostream& log) {
  if (args.per_bin_count == 0) throw ConfigError("per-bin count must be positive");
  data::MaskOptions opt;
  opt.width = opt.height = args.size;
  const auto corpus = data::generate_mask_corpus(args.per_bin_count, args.seed, opt);
  auto files = data::write_mask_corpus(args.out_dir, corpus);
  log << "wrote " << files.size() << " masks to " << args.out_dir.string() << "\n";
  return files;
}

TrainSummary cmd_train(const RunConfig& config, std::ostream& log) {
  config.validate(true);
  log << "training " << model::variant_name(config.model.variant) << " (" << config.model.preset << ") into " << config.out_dir.string() << "\n";
  const auto summary = run_training(config, [&](const StepLog& s) {
    if (s.step == 1 || s.step % 50 == 0) {
      log << "step " << s.step << " joint " << s.joint << " l1 " << s.l1 << " perceptual " << s.perceptual
          << " style " << s.style << "\n";
    }
  });
  log << "final checkpoint " << summary.final_checkpoint.string() << "\n";
  return summary;
}

data::Image cmd_infer(const InferArgs& args, std::ostream& log) {
  require_file(args.checkpoint, "checkpoint");
  require_file(args.input, "input");
  require_file(args.mask, "mask");
  require_file(args.reference, "reference");
  const auto cfg_path = args.model_config.empty() ? args.checkpoint.parent_path() / "model.cfg" : args.model_config;
  require_file(cfg_path, "model config");

  const auto cfg = model::ModelConfig::load(cfg_path);
  model::Inpainter<float> net(cfg, 0);
  auto params = net.all_parameters();
  ad::load_parameters(args.checkpoint, params, true);

  const auto input = data::read_png_rgb(args.input);
  const auto reference = data::read_png_rgb(args.reference);
  const auto mask = data::read_mask_png(args.mask);
  if (reference.width != input.width || reference.height != input.height || mask.width != input.width ||
      mask.height != input.height) {
    throw ConfigError("input, mask and reference must share one size");
  }

  ad::NoGradGuard no_grad;
  const auto out = net.inpaint(data::image_to_tensor<float>(input), data::mask_to_tensor<float>(mask),
                               data::image_to_tensor<float>(reference));
  auto generated = data::tensor_to_image(out.generated);
  // Composite in 8-bit space so known pixels are copied verbatim.
  auto result = input;
  for (std::size_t y = 0; y < input.height; ++y) {
    for (std::size_t x = 0; x < input.width; ++x) {
      if (!mask.values[y * mask.width + x]) continue;
      for (std::size_t c = 0; c < 3; ++c) result.at(x, y, c) = generated.at(x, y, c);
    }
  }
  if (!args.output.empty()) {
    if (args.output.has_parent_path()) fs::create_directories(args.output.parent_path());
    data::write_png(args.output, result);
    log << "wrote " << args.output.string() << "\n";
  }
  if (!args.grid.empty()) {
    std::vector<data::Image> panels{reference, data::apply_mask(input, mask), result};
    if (!args.ground_truth.empty()) panels.push_back(data::read_png_rgb(args.ground_truth));
    if (args.grid.has_parent_path()) fs::create_directories(args.grid.parent_path());
    data::write_png(args.grid, data::hconcat(panels));
    log << "wrote " << args.grid.string() << "\n";
  }
  return result;
}

metrics::EvalReport cmd_eval(const EvalArgs& args, std::ostream& log) {
  require_dir(args.pred_dir, "prediction");
  require_dir(args.gt_dir, "ground truth");
  require_dir(args.mask_dir, "mask");
  if (count_pngs(args.pred_dir) == 0) throw ConfigError("prediction directory contains no PNG images");
  const auto fx = make_extractor(args.extractor);
  auto report = metrics::evaluate_run(args.pred_dir, args.gt_dir, args.mask_dir, *fx);
  if (report.per_image.empty()) throw ConfigError("no prediction matched a ground truth and mask file");
  if (!args.out_dir.empty()) metrics::write_report(args.out_dir, report);
  log << metrics::format_report_text(report);
  for (const auto& o : report.orphans) log << "warning: orphan file " << o << "\n";
  return report;
}

}  // namespace refinpaint::train

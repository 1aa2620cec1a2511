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

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "refinpaint/data/masks.hpp"
#include "refinpaint/loss/feature_extractor.hpp"

namespace refinpaint::metrics {

inline constexpr const char* kFrechetLabel = "FD (pluggable)";

struct ImageScore {
  std::string name;
  std::size_t bin = 0;
  double psnr = 0;
  double ssim = 0;
};

struct BinSummary {
  std::string label;
  std::size_t count = 0;
  // NaN for empty bins.
  double psnr = 0;
  double ssim = 0;
  double frechet = 0;
  bool empty() const { return count == 0; }
};

struct EvalReport {
  std::array<BinSummary, data::kRatioBins> bins;
  // Sample-weighted mean of the non-empty bins.
  BinSummary average;
  std::vector<ImageScore> per_image;
  std::vector<std::string> orphans;
  std::map<std::string, std::string> metadata;
};

// Pooled final-stage features of each image, used for the Frechet column.
std::vector<double> embed_image(const data::Image& image, const loss::FeatureExtractor<float>& fx);

// Scores a list of (prediction, ground truth, mask) triples.
EvalReport summarize(const std::vector<ImageScore>& scores,
                     const std::array<std::vector<std::vector<double>>, data::kRatioBins>& pred_embeddings,
                     const std::array<std::vector<std::vector<double>>, data::kRatioBins>& gt_embeddings);

// Matches PNG files by name across the three directories. Files missing from
// any directory are reported as orphans and skipped.
EvalReport evaluate_run(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                        const std::filesystem::path& mask_dir, const loss::FeatureExtractor<float>& fx);

// per_image.csv (filename,bin,psnr,ssim), report.txt and report.json.
void write_report(const std::filesystem::path& out_dir, const EvalReport& report);
std::string format_report_text(const EvalReport& report);
std::string format_report_json(const EvalReport& report);

}  // namespace refinpaint::metrics

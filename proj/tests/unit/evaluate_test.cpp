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

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "refinpaint/errors.hpp"
#include "refinpaint/data/masks.hpp"
#include "refinpaint/data/png_io.hpp"
#include "refinpaint/loss/feature_extractor.hpp"
#include "refinpaint/metrics/evaluate.hpp"
#include "refinpaint/metrics/metrics.hpp"
#include "testing.hpp"

namespace refinpaint {
namespace {

namespace fs = std::filesystem;

// Mask whose first `rows` rows (of 64) are holes.
data::Mask band_mask(std::size_t rows) {
  data::Mask m(64, 64);
  for (std::size_t y = 0; y < rows; ++y) {
    for (std::size_t x = 0; x < 64; ++x) m.at(x, y) = 1;
  }
  return m;
}

data::Image noisy(const data::Image& im, int amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(-amplitude, amplitude);
  auto out = im;
  for (auto& p : out.pixels) p = static_cast<std::uint8_t>(std::clamp(int(p) + d(rng), 0, 255));
  return out;
}

struct Run {
  fs::path pred, gt, masks;
};

// rows per file: 16 rows of 64 = 25% (bin 20-30), 6 rows = 9.4% (bin 0-10).
Run write_run(const std::string& name, const std::vector<std::pair<std::string, std::size_t>>& files,
              int amplitude) {
  const auto root = testing::scratch_dir(name);
  Run r{root / "pred", root / "gt", root / "masks"};
  for (const auto& d : {r.pred, r.gt, r.masks}) fs::create_directories(d);
  std::uint64_t seed = 1;
  for (const auto& [file, rows] : files) {
    const auto gt = testing::synthetic_scene(64, 64, 0, 0, seed);
    data::write_png(r.gt / file, gt);
    data::write_png(r.pred / file, amplitude ? noisy(gt, amplitude, seed + 100) : gt);
    data::write_png(r.masks / file, data::mask_to_image(band_mask(rows)));
    ++seed;
  }
  return r;
}

const loss::ConvPyramidExtractor<float>& extractor() {
  static const loss::ConvPyramidExtractor<float> fx(7);
  return fx;
}

TEST(Evaluate, IdenticalPredictionsGiveSentinels) {
  const auto r = write_run("eval_identical", {{"a.png", 16}, {"b.png", 16}, {"c.png", 6}}, 0);
  const auto rep = metrics::evaluate_run(r.pred, r.gt, r.masks, extractor());
  ASSERT_EQ(rep.per_image.size(), 3u);
  for (const auto& b : rep.bins) {
    if (b.empty()) continue;
    EXPECT_TRUE(std::isinf(b.psnr) && b.psnr > 0) << b.label;
    EXPECT_DOUBLE_EQ(b.ssim, 1.0);
    EXPECT_NEAR(b.frechet, 0.0, 1e-9);
  }
  EXPECT_EQ(rep.bins[2].count, 2u);
  EXPECT_EQ(rep.bins[0].count, 1u);
  EXPECT_TRUE(std::isinf(rep.average.psnr));
}

TEST(Evaluate, EveryBinIsPresentAndEmptyOnesAreFlagged) {
  const auto r = write_run("eval_single", {{"only.png", 16}}, 6);
  const auto rep = metrics::evaluate_run(r.pred, r.gt, r.masks, extractor());
  ASSERT_EQ(rep.bins.size(), 6u);
  for (std::size_t b = 0; b < 6; ++b) {
    EXPECT_EQ(rep.bins[b].label, data::bin_name(b));
    EXPECT_EQ(rep.bins[b].empty(), b != 2);
    if (b != 2) {
      EXPECT_TRUE(std::isnan(rep.bins[b].psnr));
    }
  }
}

TEST(Evaluate, SingleFileAverageEqualsItsMetrics) {
  const auto r = write_run("eval_single", {{"only.png", 16}}, 6);
  const auto rep = metrics::evaluate_run(r.pred, r.gt, r.masks, extractor());
  const auto p = data::read_png_rgb(r.pred / "only.png");
  const auto g = data::read_png_rgb(r.gt / "only.png");
  EXPECT_EQ(rep.average.count, 1u);
  EXPECT_EQ(rep.average.psnr, metrics::psnr(p, g));
  EXPECT_EQ(rep.average.ssim, metrics::ssim(p, g));
  EXPECT_EQ(rep.average.psnr, rep.bins[2].psnr);
  EXPECT_EQ(rep.average.frechet, rep.bins[2].frechet);
}

TEST(Evaluate, AverageIsSampleWeightedBinMean) {
  const auto r = write_run("eval_weighted",
                           {{"a.png", 16}, {"b.png", 16}, {"c.png", 16}, {"d.png", 6}, {"e.png", 36}}, 10);
  const auto rep = metrics::evaluate_run(r.pred, r.gt, r.masks, extractor());
  double n = 0, psnr = 0, ssim = 0, fd = 0;
  for (const auto& b : rep.bins) {
    if (b.empty()) continue;
    n += b.count;
    psnr += b.count * b.psnr;
    ssim += b.count * b.ssim;
    fd += b.count * b.frechet;
  }
  EXPECT_EQ(n, 5);
  EXPECT_DOUBLE_EQ(rep.average.psnr, psnr / n);
  EXPECT_DOUBLE_EQ(rep.average.ssim, ssim / n);
  EXPECT_DOUBLE_EQ(rep.average.frechet, fd / n);
  // And the per-bin values are plain means over the per-image rows.
  double bin2 = 0;
  for (const auto& s : rep.per_image) {
    if (s.bin == 2) bin2 += s.psnr;
  }
  EXPECT_DOUBLE_EQ(rep.bins[2].psnr, bin2 / 3);
}

TEST(Evaluate, OrphansAreListedAndExcluded) {
  auto r = write_run("eval_orphans", {{"a.png", 16}, {"b.png", 16}}, 0);
  fs::remove(r.masks / "b.png");
  data::write_png(r.pred / "stray.png", testing::synthetic_scene(64, 64));
  const auto rep = metrics::evaluate_run(r.pred, r.gt, r.masks, extractor());
  EXPECT_EQ(rep.per_image.size(), 1u);
  EXPECT_EQ(rep.orphans, (std::vector<std::string>{"b.png", "stray.png"}));
  EXPECT_NE(metrics::format_report_text(rep).find("stray.png"), std::string::npos);
}

TEST(Evaluate, SizeMismatchThrows) {
  auto r = write_run("eval_mismatch", {{"a.png", 16}}, 0);
  data::write_png(r.pred / "a.png", testing::synthetic_scene(32, 32));
  EXPECT_THROW(metrics::evaluate_run(r.pred, r.gt, r.masks, extractor()), FormatError);
}

TEST(Evaluate, WrittenReportFormats) {
  const auto r = write_run("eval_formats", {{"a.png", 16}, {"b.png", 6}}, 8);
  const auto rep = metrics::evaluate_run(r.pred, r.gt, r.masks, extractor());
  const auto out = testing::scratch_dir("eval_formats_out");
  metrics::write_report(out, rep);

  std::ifstream csv(out / "per_image.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "filename,bin,psnr,ssim");
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 2u);

  std::ifstream jf(out / "report.json");
  const auto j = nlohmann::json::parse(jf);
  EXPECT_EQ(j["fd_label"], "FD (pluggable)");
  ASSERT_EQ(j["bins"].size(), 6u);
  EXPECT_EQ(j["bins"][3]["empty"], true);
  EXPECT_TRUE(j["bins"][3]["psnr"].is_null());
  EXPECT_EQ(j["average"]["count"], 2);
  EXPECT_DOUBLE_EQ(j["average"]["psnr"].get<double>(), rep.average.psnr);

  const auto text = metrics::format_report_text(rep);
  EXPECT_NE(text.find("FD (pluggable)"), std::string::npos);
  EXPECT_NE(text.find("Average"), std::string::npos);
  EXPECT_NE(text.find("50-60"), std::string::npos);
}

}  // namespace
}  // namespace refinpaint

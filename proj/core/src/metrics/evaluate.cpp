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

#include "refinpaint/metrics/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>

#include "refinpaint/data/png_io.hpp"
#include "refinpaint/errors.hpp"
#include "refinpaint/metrics/metrics.hpp"

namespace refinpaint::metrics {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::set<std::string> png_names(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FormatError("not a directory: " + dir.string());
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") names.insert(e.path().filename().string());
  }
  return names;
}

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::json bin_json(const BinSummary& b) {
  return {{"bin", b.label},          {"count", b.count},
          {"psnr", json_number(b.psnr)}, {"ssim", json_number(b.ssim)},
          {"fd", json_number(b.frechet)}, {"empty", b.empty()}};
}

}  // namespace

std::vector<double> embed_image(const data::Image& image, const loss::FeatureExtractor<float>& fx) {
  ad::NoGradGuard no_grad;
  const auto feats = fx.features(data::image_to_tensor<float>(image));
  const auto& last = feats.back();
  const auto c = last.dim(1), plane = last.dim(2) * last.dim(3);
  const auto v = last.data();
  std::vector<double> out(c, 0.0);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t i = 0; i < plane; ++i) out[ch] += v[ch * plane + i];
    out[ch] /= static_cast<double>(plane);
  }
  return out;
}

EvalReport summarize(const std::vector<ImageScore>& scores,
                     const std::array<std::vector<std::vector<double>>, data::kRatioBins>& pred_embeddings,
                     const std::array<std::vector<std::vector<double>>, data::kRatioBins>& gt_embeddings) {
  EvalReport report;
  report.per_image = scores;
  for (std::size_t b = 0; b < data::kRatioBins; ++b) {
    auto& bin = report.bins[b];
    bin.label = data::bin_name(b);
    double psnr_sum = 0, ssim_sum = 0;
    for (const auto& s : scores) {
      if (s.bin != b) continue;
      ++bin.count;
      psnr_sum += s.psnr;
      ssim_sum += s.ssim;
    }
    if (bin.count == 0) {
      bin.psnr = bin.ssim = bin.frechet = kNaN;
      continue;
    }
    bin.psnr = psnr_sum / static_cast<double>(bin.count);
    bin.ssim = ssim_sum / static_cast<double>(bin.count);
    if (!pred_embeddings[b].empty() && pred_embeddings[b].size() == gt_embeddings[b].size()) {
      bin.frechet = frechet_distance(gaussian_stats(pred_embeddings[b]), gaussian_stats(gt_embeddings[b]));
    } else {
      bin.frechet = kNaN;
    }
  }
  auto& avg = report.average;
  avg.label = "Average";
  double psnr = 0, ssim = 0, fd = 0;
  for (const auto& bin : report.bins) {
    if (bin.empty()) continue;
    avg.count += bin.count;
    const double n = static_cast<double>(bin.count);
    psnr += n * bin.psnr;
    ssim += n * bin.ssim;
    fd += n * bin.frechet;
  }
  if (avg.count == 0) {
    avg.psnr = avg.ssim = avg.frechet = kNaN;
  } else {
    const double n = static_cast<double>(avg.count);
    avg.psnr = psnr / n;
    avg.ssim = ssim / n;
    avg.frechet = fd / n;
  }
  return report;
}

EvalReport evaluate_run(const fs::path& pred_dir, const fs::path& gt_dir, const fs::path& mask_dir,
                        const loss::FeatureExtractor<float>& fx) {
  const auto pred = png_names(pred_dir), gt = png_names(gt_dir), masks = png_names(mask_dir);
  std::set<std::string> all;
  all.insert(pred.begin(), pred.end());
  all.insert(gt.begin(), gt.end());
  all.insert(masks.begin(), masks.end());

  std::vector<ImageScore> scores;
  std::vector<std::string> orphans;
  std::array<std::vector<std::vector<double>>, data::kRatioBins> pred_emb, gt_emb;
  for (const auto& name : all) {
    if (!pred.count(name) || !gt.count(name) || !masks.count(name)) {
      orphans.push_back(name);
      continue;
    }
    const auto p = data::read_png_rgb(pred_dir / name);
    const auto g = data::read_png_rgb(gt_dir / name);
    const auto m = data::read_mask_png(mask_dir / name);
    if (p.width != g.width || p.height != g.height || m.width != p.width || m.height != p.height) {
      throw FormatError("size mismatch between prediction, ground truth and mask for " + name);
    }
    ImageScore s;
    s.name = name;
    s.bin = data::classify_mask_ratio(m);
    s.psnr = psnr(p, g);
    s.ssim = ssim(p, g);
    scores.push_back(s);
    pred_emb[s.bin].push_back(embed_image(p, fx));
    gt_emb[s.bin].push_back(embed_image(g, fx));
  }
  auto report = summarize(scores, pred_emb, gt_emb);
  report.orphans = std::move(orphans);
  report.metadata["pred_dir"] = pred_dir.string();
  report.metadata["gt_dir"] = gt_dir.string();
  report.metadata["mask_dir"] = mask_dir.string();
  return report;
}

std::string format_report_text(const EvalReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %7s %12s %10s %16s\n", "bin", "count", "PSNR", "SSIM", kFrechetLabel);
  out += line;
  auto cell = [](double v, const char* fmt) -> std::string {
    if (std::isnan(v)) return "-";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
  };
  auto row = [&](const BinSummary& b) {
    std::snprintf(line, sizeof line, "%-8s %7zu %12s %10s %16s\n", b.label.c_str(), b.count,
                  cell(b.psnr, "%.4f").c_str(), cell(b.ssim, "%.4f").c_str(), cell(b.frechet, "%.6f").c_str());
    out += line;
  };
  for (const auto& b : report.bins) row(b);
  row(report.average);
  if (!report.orphans.empty()) {
    out += "orphans (excluded):\n";
    for (const auto& o : report.orphans) out += "  " + o + "\n";
  }
  return out;
}

std::string format_report_json(const EvalReport& report) {
  nlohmann::json j;
  j["fd_label"] = kFrechetLabel;
  j["bins"] = nlohmann::json::array();
  for (const auto& b : report.bins) j["bins"].push_back(bin_json(b));
  j["average"] = bin_json(report.average);
  j["orphans"] = report.orphans;
  j["warnings"] = report.orphans.size();
  j["metadata"] = report.metadata;
  return j.dump(2);
}

void write_report(const fs::path& out_dir, const EvalReport& report) {
  fs::create_directories(out_dir);
  {
    std::ofstream f(out_dir / "per_image.csv");
    if (!f) throw FormatError("cannot write " + (out_dir / "per_image.csv").string());
    f << "filename,bin,psnr,ssim\n";
    for (const auto& s : report.per_image) {
      f << s.name << ',' << data::bin_name(s.bin) << ',' << number(s.psnr) << ',' << number(s.ssim) << '\n';
    }
  }
  std::ofstream(out_dir / "report.txt") << format_report_text(report);
  std::ofstream(out_dir / "report.json") << format_report_json(report) << '\n';
}

}  // namespace refinpaint::metrics

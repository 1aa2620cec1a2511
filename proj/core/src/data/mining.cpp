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

#include "refinpaint/data/mining.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "refinpaint/data/masks.hpp"
#include "refinpaint/data/png_io.hpp"
#include "refinpaint/errors.hpp"

namespace refinpaint::data {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_json_line(const ImagePairRecord& r) {
  json j = {{"input", r.input},
            {"reference", r.reference},
            {"matches", r.matches},
            {"cx_in", r.cx_in},
            {"cy_in", r.cy_in},
            {"cx_ref", r.cx_ref},
            {"cy_ref", r.cy_ref},
            {"source_input", r.source_input},
            {"source_reference", r.source_reference},
            {"sub_image", r.sub_image},
            {"split", r.split}};
  return j.dump();
}

ImagePairRecord record_from_json_line(const std::string& line) {
  try {
    const auto j = json::parse(line);
    ImagePairRecord r;
    r.input = j.at("input").get<std::string>();
    r.reference = j.at("reference").get<std::string>();
    r.matches = j.at("matches").get<std::size_t>();
    r.cx_in = j.at("cx_in").get<double>();
    r.cy_in = j.at("cy_in").get<double>();
    r.cx_ref = j.at("cx_ref").get<double>();
    r.cy_ref = j.at("cy_ref").get<double>();
    r.source_input = j.value("source_input", "");
    r.source_reference = j.value("source_reference", "");
    r.sub_image = j.value("sub_image", std::size_t{0});
    r.split = j.value("split", "train");
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad manifest line: ") + e.what());
  }
}

void write_manifest(const fs::path& path, const std::vector<ImagePairRecord>& records) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw FormatError("cannot write manifest " + path.string());
  for (const auto& r : records) f << to_json_line(r) << '\n';
}

std::vector<ImagePairRecord> read_manifest(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot read manifest " + path.string());
  std::vector<ImagePairRecord> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(record_from_json_line(line));
  }
  return out;
}

std::vector<SubImageResult> mine_image_pair(const Image& a, const Image& b, const MiningOptions& options) {
  RI_REQUIRE(a.width == b.width && a.height == b.height, "mined images must share a size, got ",
             a.width, "x", a.height, " and ", b.width, "x", b.height);
  const auto subs_a = subdivide(a);
  const auto subs_b = subdivide(b);
  const auto origins = subdivision_origins(a.width, a.height);
  std::vector<SubImageResult> out;
  for (std::size_t k = 0; k < 5; ++k) {
    SubImageResult r;
    r.sub_image = k;
    const auto ka = detect_and_describe(subs_a[k], options.detector);
    const auto kb = detect_and_describe(subs_b[k], options.detector);
    const auto matches = match_knn(descriptors_of(ka), descriptors_of(kb), options.match);
    r.pair = crop_pair(subs_a[k], subs_b[k], ka, kb, matches, options.crop);
    r.cx_a = origins[k][0] + r.pair.cx_a;
    r.cy_a = origins[k][1] + r.pair.cy_a;
    r.cx_b = origins[k][0] + r.pair.cx_b;
    r.cy_b = origins[k][1] + r.pair.cy_b;
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::vector<std::string> png_names(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FormatError("input directory does not exist: " + dir.string());
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::string split_for(std::uint64_t seed, const std::string& name, double test_fraction) {
  std::uint64_t fnv = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) fnv = (fnv ^ c) * 0x100000001b3ULL;
  const auto h = mix_seed(seed, fnv);
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return u < test_fraction ? "test" : "train";
}

}  // namespace

MiningReport mine_directories(const fs::path& dir_a, const fs::path& dir_b, const fs::path& out_dir,
                              const MiningOptions& options) {
  const auto names_a = png_names(dir_a);
  const auto names_b = png_names(dir_b);
  std::vector<std::string> common;
  std::set_intersection(names_a.begin(), names_a.end(), names_b.begin(), names_b.end(),
                        std::back_inserter(common));
  MiningReport report;
  report.sources = common.size();
  std::vector<std::string> unpaired;
  std::set_symmetric_difference(names_a.begin(), names_a.end(), names_b.begin(), names_b.end(),
                                std::back_inserter(unpaired));
  for (const auto& name : unpaired) report.warnings.push_back(name + ": no counterpart, skipped");
  fs::create_directories(out_dir / "crops");
  for (const auto& name : common) {
    const auto a = read_png_rgb(dir_a / name);
    const auto b = read_png_rgb(dir_b / name);
    if (a.width != b.width || a.height != b.height || a.width % 2 || a.height % 2) {
      report.warnings.push_back(name + ": images differ in size or have odd sides, skipped");
      continue;
    }
    const auto stem = fs::path(name).stem().string();
    const auto split = split_for(options.seed, name, options.test_fraction);
    for (auto& r : mine_image_pair(a, b, options)) {
      ++report.candidates;
      if (!r.pair.accepted()) {
        ++report.rejections[reject_reason_name(r.pair.reason)];
        continue;
      }
      ImagePairRecord rec;
      const auto base = stem + "_" + std::to_string(r.sub_image);
      rec.input = "crops/" + base + "_input.png";
      rec.reference = "crops/" + base + "_reference.png";
      write_png(out_dir / rec.input, r.pair.crop_a);
      write_png(out_dir / rec.reference, r.pair.crop_b);
      rec.matches = r.pair.matches;
      rec.cx_in = static_cast<double>(r.cx_a);
      rec.cy_in = static_cast<double>(r.cy_a);
      rec.cx_ref = static_cast<double>(r.cx_b);
      rec.cy_ref = static_cast<double>(r.cy_b);
      rec.source_input = (dir_a / name).string();
      rec.source_reference = (dir_b / name).string();
      rec.sub_image = r.sub_image;
      rec.split = split;
      report.records.push_back(std::move(rec));
    }
  }
  write_manifest(out_dir / "manifest.jsonl", report.records);
  return report;
}

}  // namespace refinpaint::data

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
#include <map>
#include <string>
#include <vector>

#include "refinpaint/data/matching.hpp"

namespace refinpaint::data {

// One mined (input, reference) crop pair. Paths are relative to the manifest
// directory; centres are in source-image pixel coordinates.
struct ImagePairRecord {
  std::string input;
  std::string reference;
  std::size_t matches = 0;
  double cx_in = 0, cy_in = 0, cx_ref = 0, cy_ref = 0;
  std::string source_input;
  std::string source_reference;
  std::size_t sub_image = 0;  // 0-3 quadrants, 4 centre
  std::string split;          // "train" or "test"

  bool operator==(const ImagePairRecord&) const = default;
};

std::string to_json_line(const ImagePairRecord& record);
ImagePairRecord record_from_json_line(const std::string& line);
void write_manifest(const std::filesystem::path& path, const std::vector<ImagePairRecord>& records);
std::vector<ImagePairRecord> read_manifest(const std::filesystem::path& path);

struct MiningOptions {
  DetectorOptions detector;
  MatchOptions match;
  CropOptions crop;
  std::uint64_t seed = 0;
  double test_fraction = 0.1;
};

// Result for one sub-image pair, centres already in source coordinates.
struct SubImageResult {
  std::size_t sub_image = 0;
  CropPair pair;
  std::size_t cx_a = 0, cy_a = 0, cx_b = 0, cy_b = 0;
};

// subdivide -> detect/describe -> match -> crop for each of the five
// corresponding sub-image pairs of two same-sized images.
std::vector<SubImageResult> mine_image_pair(const Image& a, const Image& b, const MiningOptions& options);

struct MiningReport {
  std::size_t sources = 0;     // source pairs found by matching filenames
  std::size_t candidates = 0;  // sub-image pairs examined
  std::vector<ImagePairRecord> records;
  std::map<std::string, std::size_t> rejections;
  std::vector<std::string> warnings;
};

// Pairs PNG files with the same filename in dir_a and dir_b, mines every
// pair, writes crops to out_dir/crops and the manifest to
// out_dir/manifest.jsonl. Deterministic for fixed inputs and seed.
MiningReport mine_directories(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b,
                              const std::filesystem::path& out_dir, const MiningOptions& options);

}  // namespace refinpaint::data

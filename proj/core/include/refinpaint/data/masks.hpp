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
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "refinpaint/data/image.hpp"

namespace refinpaint::data {

inline constexpr std::size_t kRatioBins = 6;

// "0-10", "10-20", ..., "50-60".
const std::string& bin_name(std::size_t bin);
// Inverse of bin_name; throws ContractViolation on unknown names.
std::size_t parse_bin_name(const std::string& name);

// Bins are left-closed / right-open tenths: [0, 0.1), ..., [0.5, 0.6).
// Throws ContractViolation for non-binary values and ProtocolError for a
// ratio >= 0.6. Integer arithmetic, so exact boundaries behave as documented.
std::size_t classify_mask_ratio(const Mask& mask);

// True iff any pixel on the outer row/column ring is missing.
bool touches_boundary(const Mask& mask);

struct MaskSpec {
  Mask mask;
  std::size_t bin = 0;
  bool damaged_boundary = false;
};

struct MaskOptions {
  std::size_t width = 256;
  std::size_t height = 256;
  // Ring forced to 0 when the mask must not touch the border.
  std::size_t border_band = 2;
  // Strokes attempted before giving up.
  std::size_t max_strokes = 20000;
};

// Free-form brush strokes (random walks stamped with discs of varying radius)
// accumulated until the hole count reaches a target drawn inside the bin.
// Deterministic per seed.
MaskSpec gen_irregular_mask(std::size_t bin, bool damaged_boundary, std::uint64_t seed,
                            const MaskOptions& options = {});

// per_bin_count masks per bin, the first half of each bin with damaged
// boundaries (ceil for odd counts).
std::vector<MaskSpec> generate_mask_corpus(std::size_t per_bin_count, std::uint64_t seed,
                                           const MaskOptions& options = {});

// Writes <out>/<bin name>/mask_<bin>_<index>_<b|i>.png. Returns file paths.
std::vector<std::filesystem::path> write_mask_corpus(const std::filesystem::path& out_dir,
                                                     const std::vector<MaskSpec>& corpus);

struct CorpusEntry {
  std::filesystem::path path;
  std::size_t bin = 0;
};

// Reads a directory tree whose subdirectories are named by bin_name(). Files
// are listed in sorted order.
std::vector<CorpusEntry> list_mask_corpus(const std::filesystem::path& dir);

// Stateless seed mixing (splitmix64 finaliser).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace refinpaint::data

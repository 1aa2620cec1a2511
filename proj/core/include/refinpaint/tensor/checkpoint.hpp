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
#include <string>
#include <vector>

#include "refinpaint/tensor/parameters.hpp"

namespace refinpaint::ad {

// Binary layout, all integers little-endian:
//   "TRKT" | u32 version | records until EOF
//   record: u32 name_len | name (UTF-8) | u32 rank | u64 dims[rank] | f32 values
inline constexpr char kCheckpointMagic[4] = {'T', 'R', 'K', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointRecord {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::vector<float> values;
};

void write_checkpoint(const std::filesystem::path& path, const std::vector<CheckpointRecord>& records);
// Throws FormatError on bad magic, truncated records, or a version other than
// kCheckpointVersion (the message names both versions).
std::vector<CheckpointRecord> read_checkpoint(const std::filesystem::path& path);

template <typename T>
void save_parameters(const std::filesystem::path& path, const ParameterList<T>& params);

// Copies stored values into matching parameters by name. With `strict`, every
// parameter must be present and every record must be consumed.
template <typename T>
void load_parameters(const std::filesystem::path& path, ParameterList<T>& params, bool strict = true);

}  // namespace refinpaint::ad

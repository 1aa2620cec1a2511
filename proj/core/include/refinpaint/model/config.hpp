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

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace refinpaint::model {

// Which reference-embedding pieces participate in the forward pass.
enum class Variant {
  kBasic,                     // main stream only
  kAlignWithoutHarmonization, // + deformable alignment, fused by addition
  kAlign,                     // + harmonization of the aligned features
  kFull,                      // + half-resolution reference attention
};

const char* variant_name(Variant v);
// Accepts "basic", "align-no-harmonize", "align", "full".
Variant parse_variant(const std::string& name);

struct ModelConfig {
  std::string preset = "toy";
  std::vector<std::size_t> embed_dims{32, 64, 128, 160};
  std::vector<std::size_t> num_heads{1, 2, 4, 8};
  std::vector<std::size_t> reduction_ratios{8, 4, 2, 1};
  std::vector<std::size_t> depths{2, 2, 2, 2};
  // Reference embedding runs at the first `ref_scales` stages.
  std::size_t ref_scales = 3;
  std::size_t mlp_ratio = 4;
  std::size_t deform_kernel = 3;
  std::size_t harmonize_reduction = 4;
  // Output channels of the five upsampling stages of the convolution tail.
  std::vector<std::size_t> tail_channels{64, 64, 32, 32, 16};
  Variant variant = Variant::kFull;

  static ModelConfig toy();
  static ModelConfig full();
  static ModelConfig from_preset(const std::string& name);

  std::size_t num_scales() const { return embed_dims.size(); }
  // Input sides must be multiples of this.
  std::size_t size_multiple() const;

  // Every problem found, one per entry; empty when valid.
  std::vector<std::string> problems() const;
  // Throws ContractViolation listing all problems.
  void validate() const;

  // Plain-text "key = value" lines.
  std::string serialize() const;
  static ModelConfig parse(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static ModelConfig load(const std::filesystem::path& path);
};

}  // namespace refinpaint::model

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
#include <vector>

#include "refinpaint/nn/layers.hpp"

namespace refinpaint::loss {

using ad::ParameterList;
using ad::Tensor;

inline constexpr std::size_t kFeatureStages = 5;

// Maps an RGB batch [N,3,H,W] to feature maps at decreasing resolutions.
template <typename T>
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::size_t stage_count() const = 0;
  virtual std::vector<Tensor<T>> features(const Tensor<T>& images) const = 0;
};

// Frozen five-stage conv pyramid: stage 1 is relu(conv3x3(x)), each later
// stage is relu(conv3x3(avgpool2(previous))). Weights come from a seed or from
// a checkpoint with records "stage{k}.weight" / "stage{k}.bias". Input sides
// must be divisible by 16.
template <typename T>
class ConvPyramidExtractor final : public FeatureExtractor<T> {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x5eed;

  explicit ConvPyramidExtractor(std::uint64_t seed = kDefaultSeed,
                                std::vector<std::size_t> channels = {16, 32, 64, 64, 64});

  static ConvPyramidExtractor from_checkpoint(const std::filesystem::path& path,
                                              std::vector<std::size_t> channels = {16, 32, 64, 64, 64});

  std::size_t stage_count() const override { return convs_.size(); }
  std::vector<Tensor<T>> features(const Tensor<T>& images) const override;

  const std::vector<std::size_t>& channels() const { return channels_; }
  ParameterList<T> parameters() const;

 private:
  std::vector<std::size_t> channels_;
  std::vector<nn::Conv2d<T>> convs_;
};

extern template class ConvPyramidExtractor<float>;
extern template class ConvPyramidExtractor<double>;

}  // namespace refinpaint::loss

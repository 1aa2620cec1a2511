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

#include "refinpaint/nn/layers.hpp"

namespace refinpaint::nn {

// conv3x3 -> GELU -> conv3x3 plus a skip. The skip is the identity when the
// channel counts match, otherwise a 1x1 projection.
template <typename T>
struct ResidualBlock {
  Conv2d<T> conv1, conv2;
  Conv2d<T> skip;

  ResidualBlock() = default;
  ResidualBlock(std::size_t in_channels, std::size_t out_channels, Rng& rng);

  Tensor<T> operator()(const Tensor<T>& x) const;
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

// Nearest 2x upsampling followed by a 3x3 conv.
template <typename T>
struct UpsampleConv {
  Conv2d<T> conv;

  UpsampleConv() = default;
  UpsampleConv(std::size_t in_channels, std::size_t out_channels, Rng& rng);

  Tensor<T> operator()(const Tensor<T>& x) const { return conv(ad::upsample_nearest2x(x)); }
  void collect(ParameterList<T>& out, const std::string& prefix) const {
    conv.collect(out, prefix + "conv.");
  }
};

extern template struct ResidualBlock<float>;
extern template struct ResidualBlock<double>;
extern template struct UpsampleConv<float>;
extern template struct UpsampleConv<double>;

}  // namespace refinpaint::nn

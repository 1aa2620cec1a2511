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

// Predicts per-tap (dy, dx) offsets from the concatenated input and reference
// features with a dilation 1/2/4 conv stack. The last layer starts at zero so
// the deformable convolution initially samples the regular grid.
template <typename T>
struct OffsetEstimator {
  std::size_t kernel = 3;
  Conv2d<T> near, mid, far;

  OffsetEstimator() = default;
  OffsetEstimator(std::size_t channels, std::size_t kernel, Rng& rng);

  // [N,C,H,W] x2 -> [N, 2*kernel^2, H, W]
  Tensor<T> operator()(const Tensor<T>& input, const Tensor<T>& reference) const;
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

template <typename T>
struct DeformableConv {
  std::size_t kernel = 3;
  Tensor<T> weight;  // [C_out, C_in, k, k]
  Tensor<T> bias;    // [C_out]

  DeformableConv() = default;
  DeformableConv(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, Rng& rng);

  // Same-size output; offsets must be [N, 2k^2, H, W].
  Tensor<T> operator()(const Tensor<T>& x, const Tensor<T>& offsets) const;
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

template <typename T>
struct HarmonizationOutput {
  Tensor<T> features;  // same shape as the input features
  Tensor<T> gate;      // [N, 2C], each entry in (0, 1)
};

// Blends aligned reference features into the input stream: two 1x1 conv +
// GELU fusion layers over the concatenation, a squeeze-and-gate channel
// recalibration, and a 1x1 conv + GELU back to C channels.
template <typename T>
struct PatchHarmonization {
  Conv2d<T> fuse1, fuse2;
  Linear<T> squeeze, excite;
  Conv2d<T> project;

  PatchHarmonization() = default;
  PatchHarmonization(std::size_t channels, std::size_t reduction, Rng& rng);

  HarmonizationOutput<T> forward(const Tensor<T>& input, const Tensor<T>& aligned) const;
  Tensor<T> operator()(const Tensor<T>& input, const Tensor<T>& aligned) const {
    return forward(input, aligned).features;
  }
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

extern template struct OffsetEstimator<float>;
extern template struct OffsetEstimator<double>;
extern template struct DeformableConv<float>;
extern template struct DeformableConv<double>;
extern template struct PatchHarmonization<float>;
extern template struct PatchHarmonization<double>;

}  // namespace refinpaint::nn

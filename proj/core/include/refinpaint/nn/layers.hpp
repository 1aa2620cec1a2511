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

#include <random>
#include <string>

#include "refinpaint/tensor/ops.hpp"
#include "refinpaint/tensor/parameters.hpp"

namespace refinpaint::nn {

using ad::ParameterList;
using ad::Shape;
using ad::Tensor;
using Rng = std::mt19937_64;

// U(-bound, bound) leaf that requires grad.
template <typename T>
Tensor<T> uniform_parameter(Shape shape, double bound, Rng& rng);

template <typename T>
void add_parameter(ParameterList<T>& out, const std::string& prefix, const char* name,
                   const Tensor<T>& t) {
  if (t.defined()) out.push_back({prefix + name, t});
}

template <typename T>
struct Linear {
  Tensor<T> weight;  // [out, in]
  Tensor<T> bias;    // [out]

  Linear() = default;
  Linear(std::size_t in_features, std::size_t out_features, Rng& rng);

  Tensor<T> operator()(const Tensor<T>& x) const { return ad::linear(x, weight, bias); }
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

template <typename T>
struct Conv2d {
  Tensor<T> weight;  // [out, in, k, k]
  Tensor<T> bias;    // [out]
  ad::Conv2dOptions options;

  Conv2d() = default;
  Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, Rng& rng,
         ad::Conv2dOptions options = {});
  // Convenience for "same" padding at stride 1.
  static Conv2d same(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, Rng& rng,
                     std::size_t dilation = 1);

  Tensor<T> operator()(const Tensor<T>& x) const { return ad::conv2d(x, weight, bias, options); }
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

template <typename T>
struct LayerNorm {
  Tensor<T> gamma;
  Tensor<T> beta;
  int axis = -1;
  T eps = T(1e-5);

  LayerNorm() = default;
  LayerNorm(std::size_t features, int axis);

  Tensor<T> operator()(const Tensor<T>& x) const { return ad::layer_norm(x, axis, gamma, beta, eps); }
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

struct PatchEmbedConfig {
  std::size_t patch_size = 7;
  std::size_t stride = 4;
  std::size_t padding = 3;
  std::size_t in_channels = 3;
  std::size_t embed_dim = 32;

  // Stride-2 2x2 tokenisation that halves the grid.
  static PatchEmbedConfig mini(std::size_t in_channels, std::size_t embed_dim) {
    return {2, 2, 0, in_channels, embed_dim};
  }
};

// Strided convolution followed by layer norm over channels. With
// stride < patch_size neighbouring windows overlap.
template <typename T>
struct PatchEmbed {
  PatchEmbedConfig config;
  Conv2d<T> proj;
  LayerNorm<T> norm;

  PatchEmbed() = default;
  PatchEmbed(const PatchEmbedConfig& config, Rng& rng);

  // [N,C,H,W] -> [N,embed_dim,H/stride,W/stride]. Throws SizingError when a
  // spatial dimension is not divisible by the stride.
  Tensor<T> operator()(const Tensor<T>& x) const;
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

extern template struct Linear<float>;
extern template struct Linear<double>;
extern template struct Conv2d<float>;
extern template struct Conv2d<double>;
extern template struct LayerNorm<float>;
extern template struct LayerNorm<double>;
extern template struct PatchEmbed<float>;
extern template struct PatchEmbed<double>;

}  // namespace refinpaint::nn

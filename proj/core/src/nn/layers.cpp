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

#include "refinpaint/nn/layers.hpp"

#include <cmath>

#include "refinpaint/errors.hpp"

namespace refinpaint::nn {

template <typename T>
Tensor<T> uniform_parameter(Shape shape, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<T> values(ad::element_count(shape));
  for (auto& v : values) v = static_cast<T>(dist(rng));
  return Tensor<T>::from_data(std::move(shape), std::move(values), true);
}

template <typename T>
Linear<T>::Linear(std::size_t in_features, std::size_t out_features, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_features));
  weight = uniform_parameter<T>({out_features, in_features}, bound, rng);
  bias = uniform_parameter<T>({out_features}, bound, rng);
}

template <typename T>
void Linear<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  add_parameter(out, prefix, "weight", weight);
  add_parameter(out, prefix, "bias", bias);
}

template <typename T>
Conv2d<T>::Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, Rng& rng,
                  ad::Conv2dOptions opts)
    : options(opts) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_channels * kernel * kernel));
  weight = uniform_parameter<T>({out_channels, in_channels, kernel, kernel}, bound, rng);
  bias = uniform_parameter<T>({out_channels}, bound, rng);
}

template <typename T>
Conv2d<T> Conv2d<T>::same(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
                          Rng& rng, std::size_t dilation) {
  ad::Conv2dOptions o;
  const std::size_t pad = dilation * (kernel - 1) / 2;
  o.padding = {pad, pad};
  o.dilation = {dilation, dilation};
  return Conv2d(in_channels, out_channels, kernel, rng, o);
}

template <typename T>
void Conv2d<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  add_parameter(out, prefix, "weight", weight);
  add_parameter(out, prefix, "bias", bias);
}

template <typename T>
LayerNorm<T>::LayerNorm(std::size_t features, int axis_)
    : gamma(Tensor<T>::full({features}, T(1), true)),
      beta(Tensor<T>::zeros({features}, true)),
      axis(axis_) {}

template <typename T>
void LayerNorm<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  add_parameter(out, prefix, "gamma", gamma);
  add_parameter(out, prefix, "beta", beta);
}

template <typename T>
PatchEmbed<T>::PatchEmbed(const PatchEmbedConfig& cfg, Rng& rng) : config(cfg) {
  RI_REQUIRE(cfg.stride >= 1 && cfg.stride <= cfg.patch_size,
             "patch embedding needs 1 <= stride <= patch_size, got stride ", cfg.stride,
             " patch ", cfg.patch_size);
  RI_REQUIRE(cfg.embed_dim > 0 && cfg.in_channels > 0, "patch embedding needs positive channel counts");
  ad::Conv2dOptions o;
  o.stride = {cfg.stride, cfg.stride};
  o.padding = {cfg.padding, cfg.padding};
  proj = Conv2d<T>(cfg.in_channels, cfg.embed_dim, cfg.patch_size, rng, o);
  norm = LayerNorm<T>(cfg.embed_dim, 1);
}

template <typename T>
Tensor<T> PatchEmbed<T>::operator()(const Tensor<T>& x) const {
  RI_REQUIRE(x.rank() == 4, "patch embedding expects [N,C,H,W], got ", ad::to_string(x.shape()));
  const char* names[2] = {"height", "width"};
  for (int k = 0; k < 2; ++k) {
    const auto extent = x.dim(2 + k);
    if (extent % config.stride != 0) {
      throw SizingError(detail::concat_message("patch embedding: ", names[k], " ", extent,
                                               " is not divisible by stride ", config.stride));
    }
  }
  auto y = proj(x);
  RI_REQUIRE(y.dim(2) == x.dim(2) / config.stride && y.dim(3) == x.dim(3) / config.stride,
             "patch embedding geometry (patch ", config.patch_size, ", stride ", config.stride,
             ", padding ", config.padding, ") does not produce input/stride");
  return norm(y);
}

template <typename T>
void PatchEmbed<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  proj.collect(out, prefix + "proj.");
  norm.collect(out, prefix + "norm.");
}

template Tensor<float> uniform_parameter<float>(Shape, double, Rng&);
template Tensor<double> uniform_parameter<double>(Shape, double, Rng&);
template struct Linear<float>;
template struct Linear<double>;
template struct Conv2d<float>;
template struct Conv2d<double>;
template struct LayerNorm<float>;
template struct LayerNorm<double>;
template struct PatchEmbed<float>;
template struct PatchEmbed<double>;

}  // namespace refinpaint::nn

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

#include "refinpaint/nn/alignment.hpp"

#include <algorithm>
#include <cmath>

#include "refinpaint/errors.hpp"

namespace refinpaint::nn {

namespace {

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
  RI_REQUIRE(a.rank() == 4, what, " expects [N,C,H,W] features, got ", ad::to_string(a.shape()));
  RI_REQUIRE(a.shape() == b.shape(), what, ": shapes ", ad::to_string(a.shape()), " and ",
             ad::to_string(b.shape()), " differ");
}

}  // namespace

template <typename T>
OffsetEstimator<T>::OffsetEstimator(std::size_t channels, std::size_t k, Rng& rng)
    : kernel(k),
      near(Conv2d<T>::same(2 * channels, channels, 3, rng, 1)),
      mid(Conv2d<T>::same(channels, channels, 3, rng, 2)),
      far(Conv2d<T>::same(channels, 2 * k * k, 3, rng, 4)) {
  std::fill(far.weight.mutable_data().begin(), far.weight.mutable_data().end(), T(0));
  std::fill(far.bias.mutable_data().begin(), far.bias.mutable_data().end(), T(0));
}

template <typename T>
Tensor<T> OffsetEstimator<T>::operator()(const Tensor<T>& input, const Tensor<T>& reference) const {
  require_same_shape(input, reference, "offset estimator");
  auto x = ad::concat<T>({input, reference}, 1);
  x = ad::gelu(near(x));
  x = ad::gelu(mid(x));
  return far(x);
}

template <typename T>
void OffsetEstimator<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  near.collect(out, prefix + "conv1.");
  mid.collect(out, prefix + "conv2.");
  far.collect(out, prefix + "conv3.");
}

template <typename T>
DeformableConv<T>::DeformableConv(std::size_t in_channels, std::size_t out_channels, std::size_t k,
                                  Rng& rng)
    : kernel(k) {
  RI_REQUIRE(k % 2 == 1, "deformable kernel size must be odd, got ", k);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_channels * k * k));
  weight = uniform_parameter<T>({out_channels, in_channels, k, k}, bound, rng);
  bias = uniform_parameter<T>({out_channels}, bound, rng);
}

template <typename T>
Tensor<T> DeformableConv<T>::operator()(const Tensor<T>& x, const Tensor<T>& offsets) const {
  RI_REQUIRE(offsets.rank() == 4 && offsets.dim(1) == 2 * kernel * kernel,
             "deformable conv expects ", 2 * kernel * kernel, " offset channels, got ",
             ad::to_string(offsets.shape()));
  ad::Conv2dOptions o;
  o.padding = {kernel / 2, kernel / 2};
  return ad::deform_conv2d(x, offsets, weight, bias, o);
}

template <typename T>
void DeformableConv<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  add_parameter(out, prefix, "weight", weight);
  add_parameter(out, prefix, "bias", bias);
}

template <typename T>
PatchHarmonization<T>::PatchHarmonization(std::size_t channels, std::size_t reduction, Rng& rng)
    : fuse1(2 * channels, 2 * channels, 1, rng),
      fuse2(2 * channels, 2 * channels, 1, rng),
      squeeze(2 * channels, std::max<std::size_t>(1, 2 * channels / std::max<std::size_t>(1, reduction)),
              rng),
      excite(squeeze.weight.dim(0), 2 * channels, rng),
      project(2 * channels, channels, 1, rng) {}

template <typename T>
HarmonizationOutput<T> PatchHarmonization<T>::forward(const Tensor<T>& input,
                                                      const Tensor<T>& aligned) const {
  require_same_shape(input, aligned, "patch harmonization");
  auto x = ad::concat<T>({input, aligned}, 1);
  x = ad::gelu(fuse1(x));
  x = ad::gelu(fuse2(x));
  // Global average pool over H, W -> [N, 2C].
  auto pooled = ad::mean(ad::mean(x, 3), 2);
  auto gate = ad::sigmoid(excite(ad::gelu(squeeze(pooled))));
  auto gated = ad::channel_scale(x, gate);
  return {ad::gelu(project(gated)), gate};
}

template <typename T>
void PatchHarmonization<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  fuse1.collect(out, prefix + "fuse1.");
  fuse2.collect(out, prefix + "fuse2.");
  squeeze.collect(out, prefix + "squeeze.");
  excite.collect(out, prefix + "excite.");
  project.collect(out, prefix + "project.");
}

template struct OffsetEstimator<float>;
template struct OffsetEstimator<double>;
template struct DeformableConv<float>;
template struct DeformableConv<double>;
template struct PatchHarmonization<float>;
template struct PatchHarmonization<double>;

}  // namespace refinpaint::nn

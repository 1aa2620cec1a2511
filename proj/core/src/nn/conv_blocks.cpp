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

#include "refinpaint/nn/conv_blocks.hpp"

namespace refinpaint::nn {

template <typename T>
ResidualBlock<T>::ResidualBlock(std::size_t in_channels, std::size_t out_channels, Rng& rng)
    : conv1(Conv2d<T>::same(in_channels, out_channels, 3, rng)),
      conv2(Conv2d<T>::same(out_channels, out_channels, 3, rng)) {
  if (in_channels != out_channels) skip = Conv2d<T>(in_channels, out_channels, 1, rng);
}

template <typename T>
Tensor<T> ResidualBlock<T>::operator()(const Tensor<T>& x) const {
  auto body = conv2(ad::gelu(conv1(x)));
  return ad::add(skip.weight.defined() ? skip(x) : x, body);
}

template <typename T>
void ResidualBlock<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  conv1.collect(out, prefix + "conv1.");
  conv2.collect(out, prefix + "conv2.");
  if (skip.weight.defined()) skip.collect(out, prefix + "skip.");
}

template <typename T>
UpsampleConv<T>::UpsampleConv(std::size_t in_channels, std::size_t out_channels, Rng& rng)
    : conv(Conv2d<T>::same(in_channels, out_channels, 3, rng)) {}

template struct ResidualBlock<float>;
template struct ResidualBlock<double>;
template struct UpsampleConv<float>;
template struct UpsampleConv<double>;

}  // namespace refinpaint::nn

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

#include "refinpaint/loss/feature_extractor.hpp"

#include "refinpaint/errors.hpp"
#include "refinpaint/tensor/checkpoint.hpp"

namespace refinpaint::loss {

template <typename T>
ConvPyramidExtractor<T>::ConvPyramidExtractor(std::uint64_t seed, std::vector<std::size_t> channels)
    : channels_(std::move(channels)) {
  RI_REQUIRE(channels_.size() == kFeatureStages, "feature pyramid needs ", kFeatureStages,
             " stages, got ", channels_.size());
  nn::Rng rng(seed);
  std::size_t in = 3;
  for (auto c : channels_) {
    auto conv = nn::Conv2d<T>::same(in, c, 3, rng);
    // He-style scaling keeps activations from shrinking through the stack.
    auto w = conv.weight.mutable_data();
    for (auto& v : w) v *= T(2.449489742783178);  // sqrt(6)
    conv.weight.set_requires_grad(false);
    conv.bias.set_requires_grad(false);
    convs_.push_back(std::move(conv));
    in = c;
  }
}

template <typename T>
ConvPyramidExtractor<T> ConvPyramidExtractor<T>::from_checkpoint(const std::filesystem::path& path,
                                                                 std::vector<std::size_t> channels) {
  ConvPyramidExtractor fx(kDefaultSeed, std::move(channels));
  auto params = fx.parameters();
  ad::load_parameters(path, params, true);
  return fx;
}

template <typename T>
std::vector<Tensor<T>> ConvPyramidExtractor<T>::features(const Tensor<T>& images) const {
  RI_REQUIRE(images.rank() == 4 && images.dim(1) == 3, "feature extractor expects [N,3,H,W], got ",
             ad::to_string(images.shape()));
  std::vector<Tensor<T>> out;
  Tensor<T> x = images;
  for (std::size_t k = 0; k < convs_.size(); ++k) {
    if (k > 0) x = ad::avg_pool2d(x, 2);
    x = ad::relu(convs_[k](x));
    out.push_back(x);
  }
  return out;
}

template <typename T>
ParameterList<T> ConvPyramidExtractor<T>::parameters() const {
  ParameterList<T> out;
  for (std::size_t k = 0; k < convs_.size(); ++k) {
    convs_[k].collect(out, "stage" + std::to_string(k + 1) + ".");
  }
  return out;
}

template class ConvPyramidExtractor<float>;
template class ConvPyramidExtractor<double>;

}  // namespace refinpaint::loss

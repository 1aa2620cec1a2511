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

#include "refinpaint/loss/losses.hpp"

#include "refinpaint/errors.hpp"

namespace refinpaint::loss {

namespace {

template <typename T>
void require_pair(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
  RI_REQUIRE(a.defined() && b.defined() && a.shape() == b.shape(), what, ": shapes ",
             ad::to_string(a.shape()), " and ", ad::to_string(b.shape()), " differ");
}

template <typename T>
std::vector<Tensor<T>> stage_features(const Tensor<T>& x, const FeatureExtractor<T>& fx) {
  auto f = fx.features(x);
  RI_REQUIRE(f.size() == fx.stage_count(), "feature extractor returned ", f.size(),
             " stages but declares ", fx.stage_count());
  return f;
}

template <typename T>
Tensor<T> perceptual_from(const std::vector<Tensor<T>>& a, const std::vector<Tensor<T>>& b) {
  Tensor<T> total;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto term = ad::mean(ad::abs(ad::sub(a[i], b[i])));
    total = total.defined() ? ad::add(total, term) : term;
  }
  return total;
}

template <typename T>
Tensor<T> style_from(const std::vector<Tensor<T>>& a, const std::vector<Tensor<T>>& b) {
  Tensor<T> total;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto term = ad::mean(ad::abs(ad::sub(gram_matrix(a[i]), gram_matrix(b[i]))));
    total = total.defined() ? ad::add(total, term) : term;
  }
  return ad::scale(total, T(1) / static_cast<T>(a.size()));
}

}  // namespace

template <typename T>
Tensor<T> l1_loss(const Tensor<T>& output, const Tensor<T>& target) {
  require_pair(output, target, "l1_loss");
  return ad::mean(ad::abs(ad::sub(output, target)));
}

template <typename T>
Tensor<T> perceptual_loss(const Tensor<T>& output, const Tensor<T>& target,
                          const FeatureExtractor<T>& fx) {
  require_pair(output, target, "perceptual_loss");
  return perceptual_from(stage_features(output, fx), stage_features(target, fx));
}

template <typename T>
Tensor<T> gram_matrix(const Tensor<T>& features) {
  RI_REQUIRE(features.rank() == 3 || features.rank() == 4, "gram_matrix expects [C,H,W] or [N,C,H,W], got ",
             ad::to_string(features.shape()));
  const bool batched = features.rank() == 4;
  const std::size_t n = batched ? features.dim(0) : 1;
  const auto c = features.dim(-3), h = features.dim(-2), w = features.dim(-1);
  auto flat = ad::reshape(features, {n, c, h * w});
  auto g = ad::scale(ad::matmul(flat, flat, false, true), T(1) / static_cast<T>(c * h * w));
  return batched ? g : ad::reshape(g, {c, c});
}

template <typename T>
Tensor<T> style_loss(const Tensor<T>& output, const Tensor<T>& target, const FeatureExtractor<T>& fx) {
  require_pair(output, target, "style_loss");
  return style_from(stage_features(output, fx), stage_features(target, fx));
}

template <typename T>
JointLoss<T> joint_loss(const Tensor<T>& output, const Tensor<T>& target, const FeatureExtractor<T>& fx,
                        const LossWeights& weights) {
  require_pair(output, target, "joint_loss");
  RI_REQUIRE(weights.l1 >= 0 && weights.perceptual >= 0 && weights.style >= 0,
             "loss weights must be nonnegative");
  auto fo = stage_features(output, fx);
  auto ft = stage_features(target, fx);
  JointLoss<T> out;
  out.l1 = l1_loss(output, target);
  out.perceptual = perceptual_from(fo, ft);
  out.style = style_from(fo, ft);
  out.total = ad::add(ad::add(ad::scale(out.l1, static_cast<T>(weights.l1)),
                              ad::scale(out.perceptual, static_cast<T>(weights.perceptual))),
                      ad::scale(out.style, static_cast<T>(weights.style)));
  return out;
}

#define RI_INSTANTIATE(T)                                                                     \
  template Tensor<T> l1_loss(const Tensor<T>&, const Tensor<T>&);                             \
  template Tensor<T> perceptual_loss(const Tensor<T>&, const Tensor<T>&,                      \
                                     const FeatureExtractor<T>&);                             \
  template Tensor<T> gram_matrix(const Tensor<T>&);                                           \
  template Tensor<T> style_loss(const Tensor<T>&, const Tensor<T>&, const FeatureExtractor<T>&); \
  template JointLoss<T> joint_loss(const Tensor<T>&, const Tensor<T>&, const FeatureExtractor<T>&, \
                                   const LossWeights&);
RI_INSTANTIATE(float)
RI_INSTANTIATE(double)
#undef RI_INSTANTIATE

}  // namespace refinpaint::loss

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

#include "refinpaint/loss/feature_extractor.hpp"

namespace refinpaint::loss {

struct LossWeights {
  double l1 = 1.0;
  double perceptual = 0.1;
  double style = 250.0;
};

// Mean absolute difference over all elements.
template <typename T>
Tensor<T> l1_loss(const Tensor<T>& output, const Tensor<T>& target);

// Sum over stages of the mean absolute feature difference.
template <typename T>
Tensor<T> perceptual_loss(const Tensor<T>& output, const Tensor<T>& target,
                          const FeatureExtractor<T>& fx);

// [C,H,W] -> [C,C] or [N,C,H,W] -> [N,C,C]; entries divided by C*H*W.
template <typename T>
Tensor<T> gram_matrix(const Tensor<T>& features);

// Mean over stages of the mean absolute Gram difference.
template <typename T>
Tensor<T> style_loss(const Tensor<T>& output, const Tensor<T>& target, const FeatureExtractor<T>& fx);

template <typename T>
struct JointLoss {
  Tensor<T> total;
  Tensor<T> l1;
  Tensor<T> perceptual;
  Tensor<T> style;
};

template <typename T>
JointLoss<T> joint_loss(const Tensor<T>& output, const Tensor<T>& target, const FeatureExtractor<T>& fx,
                        const LossWeights& weights = {});

// Weighted sum of already computed components.
inline double combine_losses(double l1, double perceptual, double style, const LossWeights& w = {}) {
  return w.l1 * l1 + w.perceptual * perceptual + w.style * style;
}

}  // namespace refinpaint::loss

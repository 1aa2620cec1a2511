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

#include <array>
#include <cstddef>
#include <vector>

#include "refinpaint/tensor/tensor.hpp"

// Differentiable tensor operations. Every op validates its shapes and throws
// ContractViolation on mismatch. There is no implicit broadcasting; the only
// broadcasting ops are add_bias and channel_scale.
namespace refinpaint::ad {

// ---- elementwise --------------------------------------------------------

template <typename T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> scale(const Tensor<T>& x, T factor);
template <typename T> Tensor<T> add_scalar(const Tensor<T>& x, T value);

template <typename T> Tensor<T> abs(const Tensor<T>& x);
template <typename T> Tensor<T> square(const Tensor<T>& x);
template <typename T> Tensor<T> relu(const Tensor<T>& x);
// x * Phi(x) with the exact erf-based normal CDF.
template <typename T> Tensor<T> gelu(const Tensor<T>& x);
template <typename T> Tensor<T> sigmoid(const Tensor<T>& x);
template <typename T> Tensor<T> tanh(const Tensor<T>& x);

// Adds bias[c] along `axis` (bias length must equal shape[axis]).
template <typename T> Tensor<T> add_bias(const Tensor<T>& x, const Tensor<T>& bias, int axis);
// x[n, c, ...] * s[n, c]
template <typename T> Tensor<T> channel_scale(const Tensor<T>& x, const Tensor<T>& s);

// ---- linear algebra -----------------------------------------------------

// Rank-2 [M,K]x[K,N] or batched rank-3 [B,M,K]x[B,K,N]; trans flags swap the
// last two axes of the corresponding operand.
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b, bool trans_a = false, bool trans_b = false);

// x[..., K] * w[O, K]^T + bias[O]. Bias may be undefined.
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

// ---- shape --------------------------------------------------------------

template <typename T> Tensor<T> reshape(const Tensor<T>& x, Shape shape);
template <typename T> Tensor<T> permute(const Tensor<T>& x, const std::vector<std::size_t>& order);
template <typename T> Tensor<T> transpose(const Tensor<T>& x, int axis0, int axis1);
template <typename T> Tensor<T> concat(const std::vector<Tensor<T>>& parts, int axis);
template <typename T> Tensor<T> slice(const Tensor<T>& x, int axis, std::size_t start, std::size_t length);

// [N,C,H,W] <-> [N,H*W,C]
template <typename T> Tensor<T> to_tokens(const Tensor<T>& x);
template <typename T> Tensor<T> from_tokens(const Tensor<T>& tokens, std::size_t height, std::size_t width);

// ---- reductions ---------------------------------------------------------

template <typename T> Tensor<T> sum(const Tensor<T>& x);
template <typename T> Tensor<T> mean(const Tensor<T>& x);
// Removes `axis`.
template <typename T> Tensor<T> sum(const Tensor<T>& x, int axis);
template <typename T> Tensor<T> mean(const Tensor<T>& x, int axis);

// ---- normalisation ------------------------------------------------------

// Max-subtracted softmax along `axis`.
template <typename T> Tensor<T> softmax(const Tensor<T>& x, int axis);

// Normalises each slice along `axis` to zero mean / unit variance, then
// applies gamma[c], beta[c].
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, int axis, const Tensor<T>& gamma, const Tensor<T>& beta,
                     T eps);

// ---- convolution --------------------------------------------------------

struct Conv2dOptions {
  std::array<std::size_t, 2> stride{1, 1};
  std::array<std::size_t, 2> padding{0, 0};
  std::array<std::size_t, 2> dilation{1, 1};
};

// Cross-correlation: input [N,C,H,W], weight [F,C,kH,kW], bias [F] or undefined.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 const Conv2dOptions& options = {});

std::size_t conv_output_size(std::size_t in, std::size_t kernel, std::size_t stride,
                             std::size_t padding, std::size_t dilation);

// Deformable convolution: each output position p samples
// x(p + p_n + offset_n(p)) for the k*k taps p_n, using bilinear interpolation
// with zero padding. offsets is [N, 2*kH*kW, Ho, Wo] holding (dy, dx) pairs
// per tap in row-major tap order. No modulation term.
template <typename T>
Tensor<T> deform_conv2d(const Tensor<T>& input, const Tensor<T>& offsets, const Tensor<T>& weight,
                        const Tensor<T>& bias, const Conv2dOptions& options = {});

// Nearest-neighbour 2x upsampling of [N,C,H,W].
template <typename T> Tensor<T> upsample_nearest2x(const Tensor<T>& x);

// Non-overlapping k x k average pooling of [N,C,H,W]; H and W divisible by k.
template <typename T> Tensor<T> avg_pool2d(const Tensor<T>& x, std::size_t kernel);

// ---- sampling -----------------------------------------------------------

// Bilinear interpolation of one H x W plane at (y, x); neighbours outside the
// grid contribute zero.
template <typename T>
T bilinear_at(const T* plane, std::size_t height, std::size_t width, T y, T x);

// Samples every channel of a [C,H,W] tensor at (y, x). Not differentiable.
template <typename T> Tensor<T> bilinear_sample(const Tensor<T>& input, T y, T x);

}  // namespace refinpaint::ad

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

struct AttentionConfig {
  std::size_t embed_dim = 32;
  std::size_t num_heads = 1;
  // Keys/values are computed from a grid downsampled by this factor.
  std::size_t spatial_reduction_ratio = 1;

  void validate() const;
};

template <typename T>
struct AttentionOutput {
  Tensor<T> tokens;   // [N, Lq, C]
  Tensor<T> weights;  // [N*heads, Lq, Lk] row-stochastic
};

// softmax(Q K^T / sqrt(d_head)) V per head, heads concatenated and projected.
template <typename T>
struct MultiHeadAttention {
  AttentionConfig config;
  Linear<T> query, key, value, proj;
  Conv2d<T> reduce;  // only when spatial_reduction_ratio > 1
  LayerNorm<T> reduce_norm;

  MultiHeadAttention() = default;
  MultiHeadAttention(const AttentionConfig& config, Rng& rng);

  // queries: [N, Lq, C]; keys_values: [N, kv_height*kv_width, C] laid out on a
  // kv_height x kv_width grid (needed for spatial reduction).
  AttentionOutput<T> forward(const Tensor<T>& queries, const Tensor<T>& keys_values,
                             std::size_t kv_height, std::size_t kv_width) const;
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

template <typename T>
AttentionOutput<T> self_attention(const MultiHeadAttention<T>& attn, const Tensor<T>& tokens,
                                  std::size_t height, std::size_t width) {
  return attn.forward(tokens, tokens, height, width);
}

// Queries from the aligned stream, keys and values only from the reference.
template <typename T>
AttentionOutput<T> reference_attention(const MultiHeadAttention<T>& attn, const Tensor<T>& aligned,
                                       const Tensor<T>& reference, std::size_t ref_height,
                                       std::size_t ref_width) {
  return attn.forward(aligned, reference, ref_height, ref_width);
}

// x + fc2(gelu(fc1(norm(x)))) on [N, L, C] tokens.
template <typename T>
struct FeedForward {
  LayerNorm<T> norm;
  Linear<T> fc1, fc2;

  FeedForward() = default;
  FeedForward(std::size_t dim, std::size_t hidden_ratio, Rng& rng);

  Tensor<T> operator()(const Tensor<T>& tokens) const;
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

// x + SA(norm(x)) followed by the feedforward block.
template <typename T>
struct TransformerBlock {
  LayerNorm<T> norm;
  MultiHeadAttention<T> attn;
  FeedForward<T> ffb;

  TransformerBlock() = default;
  TransformerBlock(const AttentionConfig& config, std::size_t hidden_ratio, Rng& rng);

  Tensor<T> operator()(const Tensor<T>& tokens, std::size_t height, std::size_t width) const;
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

extern template struct MultiHeadAttention<float>;
extern template struct MultiHeadAttention<double>;
extern template struct FeedForward<float>;
extern template struct FeedForward<double>;
extern template struct TransformerBlock<float>;
extern template struct TransformerBlock<double>;

}  // namespace refinpaint::nn

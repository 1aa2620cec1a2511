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

#include "refinpaint/nn/attention.hpp"

#include <cmath>

#include "refinpaint/errors.hpp"

namespace refinpaint::nn {

void AttentionConfig::validate() const {
  RI_REQUIRE(embed_dim > 0 && num_heads > 0, "attention needs positive embed_dim and num_heads");
  RI_REQUIRE(embed_dim % num_heads == 0, "embed_dim ", embed_dim, " is not divisible by ", num_heads,
             " heads");
  RI_REQUIRE(spatial_reduction_ratio >= 1, "spatial reduction ratio must be >= 1");
}

template <typename T>
MultiHeadAttention<T>::MultiHeadAttention(const AttentionConfig& cfg, Rng& rng) : config(cfg) {
  cfg.validate();
  const auto c = cfg.embed_dim;
  query = Linear<T>(c, c, rng);
  key = Linear<T>(c, c, rng);
  value = Linear<T>(c, c, rng);
  proj = Linear<T>(c, c, rng);
  if (cfg.spatial_reduction_ratio > 1) {
    const auto r = cfg.spatial_reduction_ratio;
    ad::Conv2dOptions o;
    o.stride = {r, r};
    reduce = Conv2d<T>(c, c, r, rng, o);
    reduce_norm = LayerNorm<T>(c, -1);
  }
}

namespace {

// [N, L, C] -> [N*h, L, C/h]
template <typename T>
Tensor<T> split_heads(const Tensor<T>& x, std::size_t heads) {
  const auto n = x.dim(0), l = x.dim(1), c = x.dim(2);
  auto y = ad::reshape(x, {n, l, heads, c / heads});
  y = ad::permute(y, {0, 2, 1, 3});
  return ad::reshape(y, {n * heads, l, c / heads});
}

template <typename T>
Tensor<T> merge_heads(const Tensor<T>& x, std::size_t n, std::size_t heads) {
  const auto l = x.dim(1), dh = x.dim(2);
  auto y = ad::reshape(x, {n, heads, l, dh});
  y = ad::permute(y, {0, 2, 1, 3});
  return ad::reshape(y, {n, l, heads * dh});
}

}  // namespace

template <typename T>
AttentionOutput<T> MultiHeadAttention<T>::forward(const Tensor<T>& queries,
                                                  const Tensor<T>& keys_values,
                                                  std::size_t kv_height,
                                                  std::size_t kv_width) const {
  const auto c = config.embed_dim;
  RI_REQUIRE(queries.rank() == 3 && queries.dim(2) == c, "attention queries must be [N,L,", c,
             "], got ", ad::to_string(queries.shape()));
  RI_REQUIRE(keys_values.rank() == 3 && keys_values.dim(2) == c,
             "attention keys/values must be [N,L,", c, "], got ", ad::to_string(keys_values.shape()));
  RI_REQUIRE(keys_values.dim(0) == queries.dim(0), "attention batch sizes differ");
  RI_REQUIRE(keys_values.dim(1) == kv_height * kv_width, "key/value token count ",
             keys_values.dim(1), " does not match grid ", kv_height, "x", kv_width);

  Tensor<T> kv = keys_values;
  const auto r = config.spatial_reduction_ratio;
  if (r > 1) {
    if (kv_height % r != 0 || kv_width % r != 0) {
      throw SizingError(detail::concat_message("key/value grid ", kv_height, "x", kv_width,
                                               " is not divisible by reduction ratio ", r));
    }
    kv = ad::to_tokens(reduce(ad::from_tokens(kv, kv_height, kv_width)));
    kv = reduce_norm(kv);
  }

  const auto n = queries.dim(0);
  const auto heads = config.num_heads;
  auto q = split_heads(query(queries), heads);
  auto k = split_heads(key(kv), heads);
  auto v = split_heads(value(kv), heads);
  const T inv_sqrt_d = T(1) / std::sqrt(static_cast<T>(c / heads));
  auto scores = ad::scale(ad::matmul(q, k, false, true), inv_sqrt_d);
  auto weights = ad::softmax(scores, -1);
  auto mixed = merge_heads(ad::matmul(weights, v), n, heads);
  return {proj(mixed), weights};
}

template <typename T>
void MultiHeadAttention<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  query.collect(out, prefix + "q.");
  key.collect(out, prefix + "k.");
  value.collect(out, prefix + "v.");
  proj.collect(out, prefix + "proj.");
  if (config.spatial_reduction_ratio > 1) {
    reduce.collect(out, prefix + "sr.");
    reduce_norm.collect(out, prefix + "sr_norm.");
  }
}

template <typename T>
FeedForward<T>::FeedForward(std::size_t dim, std::size_t hidden_ratio, Rng& rng)
    : norm(dim, -1), fc1(dim, dim * hidden_ratio, rng), fc2(dim * hidden_ratio, dim, rng) {
  RI_REQUIRE(hidden_ratio >= 1, "feedforward hidden ratio must be >= 1");
}

template <typename T>
Tensor<T> FeedForward<T>::operator()(const Tensor<T>& tokens) const {
  return ad::add(tokens, fc2(ad::gelu(fc1(norm(tokens)))));
}

template <typename T>
void FeedForward<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  norm.collect(out, prefix + "norm.");
  fc1.collect(out, prefix + "fc1.");
  fc2.collect(out, prefix + "fc2.");
}

template <typename T>
TransformerBlock<T>::TransformerBlock(const AttentionConfig& cfg, std::size_t hidden_ratio, Rng& rng)
    : norm(cfg.embed_dim, -1), attn(cfg, rng), ffb(cfg.embed_dim, hidden_ratio, rng) {}

template <typename T>
Tensor<T> TransformerBlock<T>::operator()(const Tensor<T>& tokens, std::size_t height,
                                          std::size_t width) const {
  auto normed = norm(tokens);
  auto x = ad::add(tokens, self_attention(attn, normed, height, width).tokens);
  return ffb(x);
}

template <typename T>
void TransformerBlock<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  norm.collect(out, prefix + "norm.");
  attn.collect(out, prefix + "attn.");
  ffb.collect(out, prefix + "ffb.");
}

template struct MultiHeadAttention<float>;
template struct MultiHeadAttention<double>;
template struct FeedForward<float>;
template struct FeedForward<double>;
template struct TransformerBlock<float>;
template struct TransformerBlock<double>;

}  // namespace refinpaint::nn

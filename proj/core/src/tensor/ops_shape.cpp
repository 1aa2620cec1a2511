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

#include <algorithm>
#include <numeric>

#include "refinpaint/errors.hpp"
#include "refinpaint/tensor/ops.hpp"

namespace refinpaint::ad {

using detail::make_result;
using detail::Node;

namespace {

std::size_t normalize_axis(int axis, std::size_t rank, const char* op) {
  const int r = static_cast<int>(rank);
  if (axis < 0) axis += r;
  RI_REQUIRE(axis >= 0 && axis < r, op, ": axis ", axis, " out of range for rank ", rank);
  return static_cast<std::size_t>(axis);
}

std::pair<std::size_t, std::size_t> outer_inner(const Shape& s, std::size_t axis) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  return {outer, inner};
}

}  // namespace

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
  RI_REQUIRE(element_count(shape) == x.numel(), "reshape: cannot view ", to_string(x.shape()),
             " as ", to_string(shape));
  std::vector<T> out(x.data().begin(), x.data().end());
  return make_result<T>(std::move(shape), std::move(out), "reshape", {x}, [](Node<T>& n) {
    auto& in = *n.inputs[0];
    if (!in.requires_grad) return;
    T* g = in.grad_buffer();
    for (std::size_t i = 0; i < n.grad.size(); ++i) g[i] += n.grad[i];
  });
}

template <typename T>
Tensor<T> permute(const Tensor<T>& x, const std::vector<std::size_t>& order) {
  const auto& s = x.shape();
  const std::size_t r = s.size();
  RI_REQUIRE(order.size() == r, "permute: order has ", order.size(), " axes, tensor has ", r);
  {
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < r; ++i) RI_REQUIRE(sorted[i] == i, "permute: invalid axis order");
  }
  std::vector<std::size_t> in_strides(r, 1);
  for (std::size_t i = r; i-- > 1;) in_strides[i - 1] = in_strides[i] * s[i];
  Shape out_shape(r);
  std::vector<std::size_t> stride_of_out(r);
  for (std::size_t i = 0; i < r; ++i) {
    out_shape[i] = s[order[i]];
    stride_of_out[i] = in_strides[order[i]];
  }

  const std::size_t n = x.numel();
  auto source = std::make_shared<std::vector<std::size_t>>(n);
  std::vector<std::size_t> idx(r, 0);
  std::size_t src = 0;
  for (std::size_t flat = 0; flat < n; ++flat) {
    (*source)[flat] = src;
    for (std::size_t ax = r; ax-- > 0;) {
      ++idx[ax];
      src += stride_of_out[ax];
      if (idx[ax] < out_shape[ax]) break;
      src -= stride_of_out[ax] * out_shape[ax];
      idx[ax] = 0;
    }
  }
  const auto xv = x.data();
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = xv[(*source)[i]];
  return make_result<T>(std::move(out_shape), std::move(out), "permute", {x}, [source](Node<T>& nd) {
    auto& in = *nd.inputs[0];
    if (!in.requires_grad) return;
    T* g = in.grad_buffer();
    for (std::size_t i = 0; i < nd.grad.size(); ++i) g[(*source)[i]] += nd.grad[i];
  });
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& x, int axis0, int axis1) {
  const auto a = normalize_axis(axis0, x.rank(), "transpose");
  const auto b = normalize_axis(axis1, x.rank(), "transpose");
  std::vector<std::size_t> order(x.rank());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::swap(order[a], order[b]);
  return permute(x, order);
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, int axis_in) {
  RI_REQUIRE(!parts.empty(), "concat: no inputs");
  const auto& s0 = parts.front().shape();
  const auto axis = normalize_axis(axis_in, s0.size(), "concat");
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    const auto& s = p.shape();
    RI_REQUIRE(s.size() == s0.size(), "concat: rank mismatch");
    for (std::size_t i = 0; i < s.size(); ++i) {
      RI_REQUIRE(i == axis || s[i] == s0[i], "concat: shape ", to_string(s),
                 " incompatible with ", to_string(s0), " along axis ", axis);
    }
    widths.push_back(s[axis]);
    total += s[axis];
  }
  const auto [outer, inner] = outer_inner(s0, axis);
  Shape out_shape = s0;
  out_shape[axis] = total;
  std::vector<T> out(element_count(out_shape));
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto pv = parts[k].data();
    const std::size_t block = widths[k] * inner;
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(pv.begin() + static_cast<std::ptrdiff_t>(o * block), block,
                  out.begin() + static_cast<std::ptrdiff_t>(o * total * inner + offset * inner));
    }
    offset += widths[k];
  }
  return make_result<T>(std::move(out_shape), std::move(out), "concat", parts,
                        [widths, outer = outer, inner = inner, total](Node<T>& n) {
                          std::size_t off = 0;
                          for (std::size_t k = 0; k < widths.size(); ++k) {
                            auto& in = *n.inputs[k];
                            const std::size_t block = widths[k] * inner;
                            if (in.requires_grad) {
                              T* g = in.grad_buffer();
                              for (std::size_t o = 0; o < outer; ++o) {
                                const T* src = n.grad.data() + o * total * inner + off * inner;
                                for (std::size_t i = 0; i < block; ++i) g[o * block + i] += src[i];
                              }
                            }
                            off += widths[k];
                          }
                        });
}

template <typename T>
Tensor<T> slice(const Tensor<T>& x, int axis_in, std::size_t start, std::size_t length) {
  const auto& s = x.shape();
  const auto axis = normalize_axis(axis_in, s.size(), "slice");
  RI_REQUIRE(length > 0 && start + length <= s[axis], "slice: range [", start, ", ",
             start + length, ") exceeds dimension ", s[axis]);
  const auto [outer, inner] = outer_inner(s, axis);
  const std::size_t width = s[axis];
  Shape out_shape = s;
  out_shape[axis] = length;
  const auto xv = x.data();
  std::vector<T> out(element_count(out_shape));
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(xv.begin() + static_cast<std::ptrdiff_t>((o * width + start) * inner),
                length * inner, out.begin() + static_cast<std::ptrdiff_t>(o * length * inner));
  }
  return make_result<T>(std::move(out_shape), std::move(out), "slice", {x},
                        [outer = outer, inner = inner, width, start, length](Node<T>& n) {
                          auto& in = *n.inputs[0];
                          if (!in.requires_grad) return;
                          T* g = in.grad_buffer();
                          for (std::size_t o = 0; o < outer; ++o) {
                            const T* src = n.grad.data() + o * length * inner;
                            T* dst = g + (o * width + start) * inner;
                            for (std::size_t i = 0; i < length * inner; ++i) dst[i] += src[i];
                          }
                        });
}

template <typename T>
Tensor<T> to_tokens(const Tensor<T>& x) {
  RI_REQUIRE(x.rank() == 4, "to_tokens expects [N,C,H,W], got ", to_string(x.shape()));
  const auto n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  return reshape(permute(x, {0, 2, 3, 1}), Shape{n, h * w, c});
}

template <typename T>
Tensor<T> from_tokens(const Tensor<T>& tokens, std::size_t height, std::size_t width) {
  RI_REQUIRE(tokens.rank() == 3 && tokens.dim(1) == height * width, "from_tokens: ",
             to_string(tokens.shape()), " is not a ", height, "x", width, " token grid");
  const auto n = tokens.dim(0), c = tokens.dim(2);
  return permute(reshape(tokens, Shape{n, height, width, c}), {0, 3, 1, 2});
}

#define RI_INSTANTIATE(T)                                                                 \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                                    \
  template Tensor<T> permute(const Tensor<T>&, const std::vector<std::size_t>&);          \
  template Tensor<T> transpose(const Tensor<T>&, int, int);                               \
  template Tensor<T> concat(const std::vector<Tensor<T>>&, int);                          \
  template Tensor<T> slice(const Tensor<T>&, int, std::size_t, std::size_t);              \
  template Tensor<T> to_tokens(const Tensor<T>&);                                         \
  template Tensor<T> from_tokens(const Tensor<T>&, std::size_t, std::size_t);

RI_INSTANTIATE(float)
RI_INSTANTIATE(double)
#undef RI_INSTANTIATE

}  // namespace refinpaint::ad

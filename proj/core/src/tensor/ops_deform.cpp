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

#include <cmath>

#include "gemm.hpp"
#include "refinpaint/errors.hpp"
#include "refinpaint/tensor/ops.hpp"

namespace refinpaint::ad {

using detail::make_result;
using detail::Node;

namespace {

// Four-neighbour stencil of a fractional sample point. Corners outside the
// grid get index -1 and contribute nothing.
template <typename T>
struct Stencil {
  std::ptrdiff_t index[4] = {-1, -1, -1, -1};
  T weight[4] = {0, 0, 0, 0};
  // d weight / d y and d weight / d x for each corner.
  T dwdy[4] = {0, 0, 0, 0};
  T dwdx[4] = {0, 0, 0, 0};
};

template <typename T>
Stencil<T> make_stencil(std::size_t height, std::size_t width, T y, T x) {
  Stencil<T> s;
  const auto h = static_cast<T>(height);
  const auto w = static_cast<T>(width);
  if (!(y > T(-1) && y < h && x > T(-1) && x < w)) return s;
  const T fy = std::floor(y);
  const T fx = std::floor(x);
  const T ly = y - fy, lx = x - fx;
  const T hy = T(1) - ly, hx = T(1) - lx;
  const auto y0 = static_cast<std::ptrdiff_t>(fy);
  const auto x0 = static_cast<std::ptrdiff_t>(fx);
  const std::ptrdiff_t ys[4] = {y0, y0, y0 + 1, y0 + 1};
  const std::ptrdiff_t xs[4] = {x0, x0 + 1, x0, x0 + 1};
  const T wts[4] = {hy * hx, hy * lx, ly * hx, ly * lx};
  const T dy[4] = {-hx, -lx, hx, lx};
  const T dx[4] = {-hy, hy, -ly, ly};
  for (int k = 0; k < 4; ++k) {
    if (ys[k] < 0 || xs[k] < 0 || ys[k] >= static_cast<std::ptrdiff_t>(height) ||
        xs[k] >= static_cast<std::ptrdiff_t>(width)) {
      continue;
    }
    s.index[k] = ys[k] * static_cast<std::ptrdiff_t>(width) + xs[k];
    s.weight[k] = wts[k];
    s.dwdy[k] = dy[k];
    s.dwdx[k] = dx[k];
  }
  return s;
}

template <typename T>
T sample(const Stencil<T>& s, const T* plane) {
  T v = 0;
  for (int k = 0; k < 4; ++k) {
    if (s.index[k] >= 0) v += s.weight[k] * plane[s.index[k]];
  }
  return v;
}

}  // namespace

template <typename T>
T bilinear_at(const T* plane, std::size_t height, std::size_t width, T y, T x) {
  return sample(make_stencil<T>(height, width, y, x), plane);
}

template <typename T>
Tensor<T> bilinear_sample(const Tensor<T>& input, T y, T x) {
  RI_REQUIRE(input.rank() == 3, "bilinear_sample expects [C,H,W]");
  const std::size_t c = input.dim(0), h = input.dim(1), w = input.dim(2);
  const auto st = make_stencil<T>(h, w, y, x);
  std::vector<T> out(c);
  for (std::size_t k = 0; k < c; ++k) out[k] = sample(st, input.data().data() + k * h * w);
  return Tensor<T>::from_data(Shape{c}, std::move(out));
}

template <typename T>
Tensor<T> deform_conv2d(const Tensor<T>& input, const Tensor<T>& offsets, const Tensor<T>& weight,
                        const Tensor<T>& bias, const Conv2dOptions& options) {
  RI_REQUIRE(input.rank() == 4 && weight.rank() == 4, "deform_conv2d: input and weight must be rank 4");
  RI_REQUIRE(input.dim(1) == weight.dim(1), "deform_conv2d: input has ", input.dim(1),
             " channels but weight expects ", weight.dim(1));
  const bool has_bias = bias.defined();
  RI_REQUIRE(!has_bias || bias.numel() == weight.dim(0), "deform_conv2d: bias length mismatch");

  const std::size_t batch = input.dim(0), channels = input.dim(1);
  const std::size_t height = input.dim(2), width = input.dim(3);
  const std::size_t filters = weight.dim(0), kh = weight.dim(2), kw = weight.dim(3);
  const std::size_t taps = kh * kw;
  const std::size_t out_h =
      conv_output_size(height, kh, options.stride[0], options.padding[0], options.dilation[0]);
  const std::size_t out_w =
      conv_output_size(width, kw, options.stride[1], options.padding[1], options.dilation[1]);
  RI_REQUIRE(offsets.rank() == 4 && offsets.dim(0) == batch && offsets.dim(1) == 2 * taps &&
                 offsets.dim(2) == out_h && offsets.dim(3) == out_w,
             "deform_conv2d: offsets must be [", batch, ", ", 2 * taps, ", ", out_h, ", ", out_w,
             "], got ", to_string(offsets.shape()));

  const std::size_t positions = out_h * out_w;
  const std::size_t rows = channels * taps;
  const std::size_t in_plane = height * width;
  const auto xv = input.data();
  const auto ov = offsets.data();
  const auto wv = weight.data();

  auto cols = std::make_shared<std::vector<T>>(batch * rows * positions);
  auto stencils = std::make_shared<std::vector<Stencil<T>>>(batch * taps * positions);
  std::vector<T> out(batch * filters * positions);

  for (std::size_t n = 0; n < batch; ++n) {
    const T* off = ov.data() + n * 2 * taps * positions;
    for (std::size_t t = 0; t < taps; ++t) {
      const std::size_t i = t / kw, j = t % kw;
      for (std::size_t oh = 0; oh < out_h; ++oh) {
        for (std::size_t ow = 0; ow < out_w; ++ow) {
          const std::size_t p = oh * out_w + ow;
          const T y = static_cast<T>(static_cast<std::ptrdiff_t>(oh * options.stride[0] + i * options.dilation[0]) -
                                     static_cast<std::ptrdiff_t>(options.padding[0])) +
                      off[(2 * t) * positions + p];
          const T x = static_cast<T>(static_cast<std::ptrdiff_t>(ow * options.stride[1] + j * options.dilation[1]) -
                                     static_cast<std::ptrdiff_t>(options.padding[1])) +
                      off[(2 * t + 1) * positions + p];
          (*stencils)[(n * taps + t) * positions + p] = make_stencil<T>(height, width, y, x);
        }
      }
    }
    T* col = cols->data() + n * rows * positions;
    for (std::size_t c = 0; c < channels; ++c) {
      const T* plane = xv.data() + (n * channels + c) * in_plane;
      for (std::size_t t = 0; t < taps; ++t) {
        const Stencil<T>* st = stencils->data() + (n * taps + t) * positions;
        T* row = col + (c * taps + t) * positions;
        for (std::size_t p = 0; p < positions; ++p) row[p] = sample(st[p], plane);
      }
    }
    detail::gemm(false, false, filters, positions, rows, T(1), wv.data(), rows, col, positions, T(0),
                 out.data() + n * filters * positions, positions);
    if (has_bias) {
      const auto bv = bias.data();
      for (std::size_t f = 0; f < filters; ++f) {
        T* dst = out.data() + (n * filters + f) * positions;
        for (std::size_t p = 0; p < positions; ++p) dst[p] += bv[f];
      }
    }
  }

  std::vector<Tensor<T>> inputs{input, offsets, weight};
  if (has_bias) inputs.push_back(bias);
  return make_result<T>(
      Shape{batch, filters, out_h, out_w}, std::move(out), "deform_conv2d", inputs,
      [=](Node<T>& nd) {
        auto& X = *nd.inputs[0];
        auto& O = *nd.inputs[1];
        auto& W = *nd.inputs[2];
        const bool need_cols_grad = X.requires_grad || O.requires_grad;
        std::vector<T> dcols(need_cols_grad ? rows * positions : 0);
        for (std::size_t n = 0; n < batch; ++n) {
          const T* dy = nd.grad.data() + n * filters * positions;
          const T* col = cols->data() + n * rows * positions;
          if (W.requires_grad) {
            detail::gemm(false, true, filters, rows, positions, T(1), dy, positions, col, positions,
                         T(1), W.grad_buffer(), rows);
          }
          if (has_bias && nd.inputs[3]->requires_grad) {
            T* gb = nd.inputs[3]->grad_buffer();
            for (std::size_t f = 0; f < filters; ++f) {
              T acc = 0;
              for (std::size_t p = 0; p < positions; ++p) acc += dy[f * positions + p];
              gb[f] += acc;
            }
          }
          if (!need_cols_grad) continue;
          detail::gemm(true, false, rows, positions, filters, T(1), W.value.data(), rows, dy,
                       positions, T(0), dcols.data(), positions);
          T* gx = X.requires_grad ? X.grad_buffer() + n * channels * in_plane : nullptr;
          T* go = O.requires_grad ? O.grad_buffer() + n * 2 * taps * positions : nullptr;
          for (std::size_t c = 0; c < channels; ++c) {
            const T* plane = X.value.data() + (n * channels + c) * in_plane;
            for (std::size_t t = 0; t < taps; ++t) {
              const Stencil<T>* st = stencils->data() + (n * taps + t) * positions;
              const T* drow = dcols.data() + (c * taps + t) * positions;
              for (std::size_t p = 0; p < positions; ++p) {
                const T d = drow[p];
                const auto& s = st[p];
                T gy = 0, gxo = 0;
                for (int k = 0; k < 4; ++k) {
                  if (s.index[k] < 0) continue;
                  if (gx) gx[c * in_plane + static_cast<std::size_t>(s.index[k])] += d * s.weight[k];
                  const T v = plane[s.index[k]];
                  gy += v * s.dwdy[k];
                  gxo += v * s.dwdx[k];
                }
                if (go) {
                  go[(2 * t) * positions + p] += d * gy;
                  go[(2 * t + 1) * positions + p] += d * gxo;
                }
              }
            }
          }
        }
      });
}

#define RI_INSTANTIATE(T)                                                                     \
  template T bilinear_at(const T*, std::size_t, std::size_t, T, T);                           \
  template Tensor<T> bilinear_sample(const Tensor<T>&, T, T);                                 \
  template Tensor<T> deform_conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,      \
                                   const Tensor<T>&, const Conv2dOptions&);

RI_INSTANTIATE(float)
RI_INSTANTIATE(double)
#undef RI_INSTANTIATE

}  // namespace refinpaint::ad

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

#include "gemm.hpp"
#include "refinpaint/errors.hpp"
#include "refinpaint/tensor/ops.hpp"

namespace refinpaint::ad {

using detail::make_result;
using detail::Node;

std::size_t conv_output_size(std::size_t in, std::size_t kernel, std::size_t stride,
                             std::size_t padding, std::size_t dilation) {
  const std::size_t span = dilation * (kernel - 1) + 1;
  RI_REQUIRE(stride >= 1, "convolution stride must be >= 1");
  RI_REQUIRE(in + 2 * padding >= span, "kernel extent ", span, " does not fit padded input ",
             in + 2 * padding);
  return (in + 2 * padding - span) / stride + 1;
}

namespace {

struct ConvGeometry {
  std::size_t channels, height, width;
  std::size_t kh, kw;
  std::size_t out_h, out_w;
  Conv2dOptions opt;

  std::size_t col_rows() const { return channels * kh * kw; }
  std::size_t col_cols() const { return out_h * out_w; }
  bool pointwise() const {
    return kh == 1 && kw == 1 && opt.stride[0] == 1 && opt.stride[1] == 1 && opt.padding[0] == 0 &&
           opt.padding[1] == 0;
  }
};

template <typename T>
void im2col(const T* x, const ConvGeometry& g, T* cols) {
  const auto [sh, sw] = g.opt.stride;
  const auto [ph, pw] = g.opt.padding;
  const auto [dh, dw] = g.opt.dilation;
  for (std::size_t c = 0; c < g.channels; ++c) {
    const T* plane = x + c * g.height * g.width;
    for (std::size_t i = 0; i < g.kh; ++i) {
      for (std::size_t j = 0; j < g.kw; ++j) {
        T* row = cols + ((c * g.kh + i) * g.kw + j) * g.col_cols();
        for (std::size_t oh = 0; oh < g.out_h; ++oh) {
          const auto ih = static_cast<std::ptrdiff_t>(oh * sh + i * dh) - static_cast<std::ptrdiff_t>(ph);
          T* dst = row + oh * g.out_w;
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(g.height)) {
            std::fill_n(dst, g.out_w, T(0));
            continue;
          }
          const T* src = plane + static_cast<std::size_t>(ih) * g.width;
          for (std::size_t ow = 0; ow < g.out_w; ++ow) {
            const auto iw = static_cast<std::ptrdiff_t>(ow * sw + j * dw) - static_cast<std::ptrdiff_t>(pw);
            dst[ow] = (iw >= 0 && iw < static_cast<std::ptrdiff_t>(g.width)) ? src[iw] : T(0);
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* cols, const ConvGeometry& g, T* dx) {
  const auto [sh, sw] = g.opt.stride;
  const auto [ph, pw] = g.opt.padding;
  const auto [dh, dw] = g.opt.dilation;
  for (std::size_t c = 0; c < g.channels; ++c) {
    T* plane = dx + c * g.height * g.width;
    for (std::size_t i = 0; i < g.kh; ++i) {
      for (std::size_t j = 0; j < g.kw; ++j) {
        const T* row = cols + ((c * g.kh + i) * g.kw + j) * g.col_cols();
        for (std::size_t oh = 0; oh < g.out_h; ++oh) {
          const auto ih = static_cast<std::ptrdiff_t>(oh * sh + i * dh) - static_cast<std::ptrdiff_t>(ph);
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(g.height)) continue;
          T* dst = plane + static_cast<std::size_t>(ih) * g.width;
          const T* src = row + oh * g.out_w;
          for (std::size_t ow = 0; ow < g.out_w; ++ow) {
            const auto iw = static_cast<std::ptrdiff_t>(ow * sw + j * dw) - static_cast<std::ptrdiff_t>(pw);
            if (iw >= 0 && iw < static_cast<std::ptrdiff_t>(g.width)) dst[iw] += src[ow];
          }
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 const Conv2dOptions& options) {
  RI_REQUIRE(input.rank() == 4, "conv2d: input must be [N,C,H,W], got ", to_string(input.shape()));
  RI_REQUIRE(weight.rank() == 4, "conv2d: weight must be [F,C,kH,kW], got ",
             to_string(weight.shape()));
  RI_REQUIRE(input.dim(1) == weight.dim(1), "conv2d: input has ", input.dim(1),
             " channels but weight expects ", weight.dim(1));
  const bool has_bias = bias.defined();
  RI_REQUIRE(!has_bias || bias.numel() == weight.dim(0), "conv2d: bias length mismatch");

  ConvGeometry g{input.dim(1), input.dim(2), input.dim(3), weight.dim(2), weight.dim(3), 0, 0, options};
  g.out_h = conv_output_size(g.height, g.kh, options.stride[0], options.padding[0], options.dilation[0]);
  g.out_w = conv_output_size(g.width, g.kw, options.stride[1], options.padding[1], options.dilation[1]);

  const std::size_t batch = input.dim(0);
  const std::size_t filters = weight.dim(0);
  const std::size_t in_plane = g.channels * g.height * g.width;
  const std::size_t out_plane = filters * g.col_cols();
  const std::size_t col_size = g.col_rows() * g.col_cols();
  const auto xv = input.data();
  const auto wv = weight.data();

  // Columns are kept for the weight gradient; pointwise convs read the input directly.
  auto cols = std::make_shared<std::vector<T>>(g.pointwise() ? 0 : batch * col_size);
  std::vector<T> out(batch * out_plane);
  for (std::size_t n = 0; n < batch; ++n) {
    const T* col_ptr = xv.data() + n * in_plane;
    if (!g.pointwise()) {
      im2col(xv.data() + n * in_plane, g, cols->data() + n * col_size);
      col_ptr = cols->data() + n * col_size;
    }
    detail::gemm(false, false, filters, g.col_cols(), g.col_rows(), T(1), wv.data(), g.col_rows(),
                 col_ptr, g.col_cols(), T(0), out.data() + n * out_plane, g.col_cols());
    if (has_bias) {
      const auto bv = bias.data();
      for (std::size_t f = 0; f < filters; ++f) {
        T* dst = out.data() + n * out_plane + f * g.col_cols();
        for (std::size_t k = 0; k < g.col_cols(); ++k) dst[k] += bv[f];
      }
    }
  }

  std::vector<Tensor<T>> inputs{input, weight};
  if (has_bias) inputs.push_back(bias);
  return make_result<T>(
      Shape{batch, filters, g.out_h, g.out_w}, std::move(out), "conv2d", inputs,
      [=](Node<T>& nd) {
        auto& X = *nd.inputs[0];
        auto& W = *nd.inputs[1];
        std::vector<T> dcols(X.requires_grad ? col_size : 0);
        for (std::size_t n = 0; n < batch; ++n) {
          const T* dy = nd.grad.data() + n * out_plane;
          if (W.requires_grad) {
            const T* col_ptr = g.pointwise() ? X.value.data() + n * in_plane : cols->data() + n * col_size;
            detail::gemm(false, true, filters, g.col_rows(), g.col_cols(), T(1), dy, g.col_cols(),
                         col_ptr, g.col_cols(), T(1), W.grad_buffer(), g.col_rows());
          }
          if (X.requires_grad) {
            T* dx = X.grad_buffer() + n * in_plane;
            if (g.pointwise()) {
              detail::gemm(true, false, g.col_rows(), g.col_cols(), filters, T(1), W.value.data(),
                           g.col_rows(), dy, g.col_cols(), T(1), dx, g.col_cols());
            } else {
              detail::gemm(true, false, g.col_rows(), g.col_cols(), filters, T(1), W.value.data(),
                           g.col_rows(), dy, g.col_cols(), T(0), dcols.data(), g.col_cols());
              col2im_add(dcols.data(), g, dx);
            }
          }
          if (has_bias && nd.inputs[2]->requires_grad) {
            T* gb = nd.inputs[2]->grad_buffer();
            for (std::size_t f = 0; f < filters; ++f) {
              T acc = 0;
              for (std::size_t k = 0; k < g.col_cols(); ++k) acc += dy[f * g.col_cols() + k];
              gb[f] += acc;
            }
          }
        }
      });
}

template <typename T>
Tensor<T> upsample_nearest2x(const Tensor<T>& x) {
  RI_REQUIRE(x.rank() == 4, "upsample_nearest2x expects [N,C,H,W]");
  const std::size_t planes = x.dim(0) * x.dim(1);
  const std::size_t h = x.dim(2), w = x.dim(3);
  const auto xv = x.data();
  std::vector<T> out(planes * 4 * h * w);
  for (std::size_t p = 0; p < planes; ++p) {
    const T* src = xv.data() + p * h * w;
    T* dst = out.data() + p * 4 * h * w;
    for (std::size_t i = 0; i < 2 * h; ++i) {
      for (std::size_t j = 0; j < 2 * w; ++j) dst[i * 2 * w + j] = src[(i / 2) * w + j / 2];
    }
  }
  return make_result<T>(Shape{x.dim(0), x.dim(1), 2 * h, 2 * w}, std::move(out), "upsample_nearest2x",
                        {x}, [planes, h, w](Node<T>& n) {
                          auto& in = *n.inputs[0];
                          if (!in.requires_grad) return;
                          T* g = in.grad_buffer();
                          for (std::size_t p = 0; p < planes; ++p) {
                            const T* src = n.grad.data() + p * 4 * h * w;
                            T* dst = g + p * h * w;
                            for (std::size_t i = 0; i < 2 * h; ++i) {
                              for (std::size_t j = 0; j < 2 * w; ++j) {
                                dst[(i / 2) * w + j / 2] += src[i * 2 * w + j];
                              }
                            }
                          }
                        });
}

template <typename T>
Tensor<T> avg_pool2d(const Tensor<T>& x, std::size_t kernel) {
  RI_REQUIRE(x.rank() == 4, "avg_pool2d expects [N,C,H,W]");
  RI_REQUIRE(kernel >= 1, "avg_pool2d: kernel must be positive");
  const std::size_t h = x.dim(2), w = x.dim(3);
  if (h % kernel != 0 || w % kernel != 0) {
    throw SizingError(refinpaint::detail::concat_message("avg_pool2d: spatial size ", h, "x", w,
                                             " not divisible by ", kernel));
  }
  const std::size_t planes = x.dim(0) * x.dim(1);
  const std::size_t oh = h / kernel, ow = w / kernel;
  const T inv = T(1) / static_cast<T>(kernel * kernel);
  const auto xv = x.data();
  std::vector<T> out(planes * oh * ow, T(0));
  for (std::size_t p = 0; p < planes; ++p) {
    const T* src = xv.data() + p * h * w;
    T* dst = out.data() + p * oh * ow;
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) dst[(i / kernel) * ow + j / kernel] += src[i * w + j] * inv;
    }
  }
  return make_result<T>(Shape{x.dim(0), x.dim(1), oh, ow}, std::move(out), "avg_pool2d", {x},
                        [=](Node<T>& n) {
                          auto& in = *n.inputs[0];
                          if (!in.requires_grad) return;
                          T* g = in.grad_buffer();
                          for (std::size_t p = 0; p < planes; ++p) {
                            const T* src = n.grad.data() + p * oh * ow;
                            T* dst = g + p * h * w;
                            for (std::size_t i = 0; i < h; ++i) {
                              for (std::size_t j = 0; j < w; ++j) {
                                dst[i * w + j] += src[(i / kernel) * ow + j / kernel] * inv;
                              }
                            }
                          }
                        });
}

#define RI_INSTANTIATE(T)                                                                       \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,              \
                            const Conv2dOptions&);                                              \
  template Tensor<T> upsample_nearest2x(const Tensor<T>&);                                      \
  template Tensor<T> avg_pool2d(const Tensor<T>&, std::size_t);

RI_INSTANTIATE(float)
RI_INSTANTIATE(double)
#undef RI_INSTANTIATE

}  // namespace refinpaint::ad

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
#include <cmath>

#include "gemm.hpp"
#include "refinpaint/errors.hpp"
#include "refinpaint/tensor/ops.hpp"

namespace refinpaint::ad {

using detail::make_result;
using detail::Node;

namespace {

struct AxisSplit {
  std::size_t outer = 1;
  std::size_t channels = 1;
  std::size_t inner = 1;
};

AxisSplit split_at(const Shape& s, int axis, const char* op) {
  const int r = static_cast<int>(s.size());
  if (axis < 0) axis += r;
  RI_REQUIRE(axis >= 0 && axis < r, op, ": axis ", axis, " out of range for shape ", to_string(s));
  AxisSplit out;
  for (int i = 0; i < axis; ++i) out.outer *= s[static_cast<std::size_t>(i)];
  out.channels = s[static_cast<std::size_t>(axis)];
  for (int i = axis + 1; i < r; ++i) out.inner *= s[static_cast<std::size_t>(i)];
  return out;
}

Shape drop_axis(Shape s, int axis) {
  const int r = static_cast<int>(s.size());
  if (axis < 0) axis += r;
  s.erase(s.begin() + axis);
  if (s.empty()) s.push_back(1);
  return s;
}

}  // namespace

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
  T acc = 0;
  for (T v : x.data()) acc += v;
  return make_result<T>(Shape{1}, {acc}, "sum", {x}, [](Node<T>& n) {
    auto& in = *n.inputs[0];
    if (!in.requires_grad) return;
    T* g = in.grad_buffer();
    for (std::size_t i = 0; i < in.value.size(); ++i) g[i] += n.grad[0];
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& x) {
  return scale(sum(x), T(1) / static_cast<T>(x.numel()));
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x, int axis) {
  const auto sp = split_at(x.shape(), axis, "sum");
  const auto xv = x.data();
  std::vector<T> out(sp.outer * sp.inner, T(0));
  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (std::size_t c = 0; c < sp.channels; ++c) {
      const T* src = xv.data() + (o * sp.channels + c) * sp.inner;
      T* dst = out.data() + o * sp.inner;
      for (std::size_t i = 0; i < sp.inner; ++i) dst[i] += src[i];
    }
  }
  return make_result<T>(drop_axis(x.shape(), axis), std::move(out), "sum_axis", {x}, [sp](Node<T>& n) {
    auto& in = *n.inputs[0];
    if (!in.requires_grad) return;
    T* g = in.grad_buffer();
    for (std::size_t o = 0; o < sp.outer; ++o) {
      for (std::size_t c = 0; c < sp.channels; ++c) {
        T* dst = g + (o * sp.channels + c) * sp.inner;
        const T* src = n.grad.data() + o * sp.inner;
        for (std::size_t i = 0; i < sp.inner; ++i) dst[i] += src[i];
      }
    }
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& x, int axis) {
  const auto sp = split_at(x.shape(), axis, "mean");
  return scale(sum(x, axis), T(1) / static_cast<T>(sp.channels));
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& x, int axis) {
  const auto sp = split_at(x.shape(), axis, "softmax");
  const auto xv = x.data();
  std::vector<T> out(xv.size());
  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (std::size_t i = 0; i < sp.inner; ++i) {
      const std::size_t base = o * sp.channels * sp.inner + i;
      T mx = xv[base];
      for (std::size_t c = 1; c < sp.channels; ++c) mx = std::max(mx, xv[base + c * sp.inner]);
      T total = 0;
      for (std::size_t c = 0; c < sp.channels; ++c) {
        const T e = std::exp(xv[base + c * sp.inner] - mx);
        out[base + c * sp.inner] = e;
        total += e;
      }
      const T inv = T(1) / total;
      for (std::size_t c = 0; c < sp.channels; ++c) out[base + c * sp.inner] *= inv;
    }
  }
  return make_result<T>(x.shape(), std::move(out), "softmax", {x}, [sp](Node<T>& n) {
    auto& in = *n.inputs[0];
    if (!in.requires_grad) return;
    T* g = in.grad_buffer();
    for (std::size_t o = 0; o < sp.outer; ++o) {
      for (std::size_t i = 0; i < sp.inner; ++i) {
        const std::size_t base = o * sp.channels * sp.inner + i;
        T dot = 0;
        for (std::size_t c = 0; c < sp.channels; ++c) {
          dot += n.grad[base + c * sp.inner] * n.value[base + c * sp.inner];
        }
        for (std::size_t c = 0; c < sp.channels; ++c) {
          const std::size_t k = base + c * sp.inner;
          g[k] += n.value[k] * (n.grad[k] - dot);
        }
      }
    }
  });
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, int axis, const Tensor<T>& gamma, const Tensor<T>& beta,
                     T eps) {
  const auto sp = split_at(x.shape(), axis, "layer_norm");
  RI_REQUIRE(gamma.numel() == sp.channels && beta.numel() == sp.channels,
             "layer_norm: gamma/beta length must equal normalised dimension ", sp.channels);
  const auto xv = x.data();
  const auto gv = gamma.data();
  const auto bv = beta.data();
  const std::size_t slices = sp.outer * sp.inner;
  auto normalized = std::make_shared<std::vector<T>>(xv.size());
  auto rstd = std::make_shared<std::vector<T>>(slices);
  std::vector<T> out(xv.size());
  const T inv_c = T(1) / static_cast<T>(sp.channels);
  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (std::size_t i = 0; i < sp.inner; ++i) {
      const std::size_t base = o * sp.channels * sp.inner + i;
      T mu = 0;
      for (std::size_t c = 0; c < sp.channels; ++c) mu += xv[base + c * sp.inner];
      mu *= inv_c;
      T var = 0;
      for (std::size_t c = 0; c < sp.channels; ++c) {
        const T d = xv[base + c * sp.inner] - mu;
        var += d * d;
      }
      var *= inv_c;
      const T r = T(1) / std::sqrt(var + eps);
      (*rstd)[o * sp.inner + i] = r;
      for (std::size_t c = 0; c < sp.channels; ++c) {
        const std::size_t k = base + c * sp.inner;
        const T xhat = (xv[k] - mu) * r;
        (*normalized)[k] = xhat;
        out[k] = gv[c] * xhat + bv[c];
      }
    }
  }
  return make_result<T>(
      x.shape(), std::move(out), "layer_norm", {x, gamma, beta},
      [sp, normalized, rstd, inv_c](Node<T>& n) {
        auto& xin = *n.inputs[0];
        auto& gin = *n.inputs[1];
        auto& bin = *n.inputs[2];
        const auto& xhat = *normalized;
        if (gin.requires_grad || bin.requires_grad) {
          T* gg = gin.requires_grad ? gin.grad_buffer() : nullptr;
          T* gb = bin.requires_grad ? bin.grad_buffer() : nullptr;
          for (std::size_t o = 0; o < sp.outer; ++o) {
            for (std::size_t c = 0; c < sp.channels; ++c) {
              const std::size_t base = (o * sp.channels + c) * sp.inner;
              T acc_g = 0, acc_b = 0;
              for (std::size_t i = 0; i < sp.inner; ++i) {
                acc_g += n.grad[base + i] * xhat[base + i];
                acc_b += n.grad[base + i];
              }
              if (gg) gg[c] += acc_g;
              if (gb) gb[c] += acc_b;
            }
          }
        }
        if (!xin.requires_grad) return;
        T* gx = xin.grad_buffer();
        for (std::size_t o = 0; o < sp.outer; ++o) {
          for (std::size_t i = 0; i < sp.inner; ++i) {
            const std::size_t base = o * sp.channels * sp.inner + i;
            T mean_d = 0, mean_dx = 0;
            for (std::size_t c = 0; c < sp.channels; ++c) {
              const std::size_t k = base + c * sp.inner;
              const T d = n.grad[k] * gin.value[c];
              mean_d += d;
              mean_dx += d * xhat[k];
            }
            mean_d *= inv_c;
            mean_dx *= inv_c;
            const T r = (*rstd)[o * sp.inner + i];
            for (std::size_t c = 0; c < sp.channels; ++c) {
              const std::size_t k = base + c * sp.inner;
              const T d = n.grad[k] * gin.value[c];
              gx[k] += r * (d - mean_d - xhat[k] * mean_dx);
            }
          }
        }
      });
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b, bool trans_a, bool trans_b) {
  RI_REQUIRE(a.rank() == b.rank() && (a.rank() == 2 || a.rank() == 3),
             "matmul expects two rank-2 or two rank-3 tensors, got ", to_string(a.shape()), " and ",
             to_string(b.shape()));
  const bool batched = a.rank() == 3;
  const std::size_t batch = batched ? a.dim(0) : 1;
  RI_REQUIRE(!batched || b.dim(0) == batch, "matmul: batch mismatch");
  const std::size_t ar = a.dim(-2), ac = a.dim(-1), br = b.dim(-2), bc = b.dim(-1);
  const std::size_t m = trans_a ? ac : ar;
  const std::size_t k = trans_a ? ar : ac;
  const std::size_t kb = trans_b ? bc : br;
  const std::size_t n = trans_b ? br : bc;
  RI_REQUIRE(k == kb, "matmul: inner dimensions differ (", k, " vs ", kb, ")");

  const auto av = a.data();
  const auto bv = b.data();
  std::vector<T> out(batch * m * n);
  for (std::size_t p = 0; p < batch; ++p) {
    detail::gemm(trans_a, trans_b, m, n, k, T(1), av.data() + p * ar * ac, ac,
                 bv.data() + p * br * bc, bc, T(0), out.data() + p * m * n, n);
  }
  Shape shape = batched ? Shape{batch, m, n} : Shape{m, n};
  return make_result<T>(std::move(shape), std::move(out), "matmul", {a, b},
                        [=](Node<T>& nd) {
                          auto& A = *nd.inputs[0];
                          auto& B = *nd.inputs[1];
                          for (std::size_t p = 0; p < batch; ++p) {
                            const T* dc = nd.grad.data() + p * m * n;
                            const T* pa = A.value.data() + p * ar * ac;
                            const T* pb = B.value.data() + p * br * bc;
                            if (A.requires_grad) {
                              T* da = A.grad_buffer() + p * ar * ac;
                              if (!trans_a) {
                                // dA[m,k] = dC * op(B)^T
                                detail::gemm(false, !trans_b, m, k, n, T(1), dc, n, pb, bc, T(1), da, ac);
                              } else {
                                // dA[k,m] = op(B) * dC^T
                                detail::gemm(trans_b, true, k, m, n, T(1), pb, bc, dc, n, T(1), da, ac);
                              }
                            }
                            if (B.requires_grad) {
                              T* db = B.grad_buffer() + p * br * bc;
                              if (!trans_b) {
                                // dB[k,n] = op(A)^T * dC
                                detail::gemm(!trans_a, false, k, n, m, T(1), pa, ac, dc, n, T(1), db, bc);
                              } else {
                                // dB[n,k] = dC^T * op(A)
                                detail::gemm(true, trans_a, n, k, m, T(1), dc, n, pa, ac, T(1), db, bc);
                              }
                            }
                          }
                        });
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  RI_REQUIRE(weight.rank() == 2, "linear: weight must be [out, in]");
  const std::size_t in_features = weight.dim(1);
  const std::size_t out_features = weight.dim(0);
  RI_REQUIRE(x.dim(-1) == in_features, "linear: input features ", x.dim(-1),
             " do not match weight ", to_string(weight.shape()));
  const bool has_bias = bias.defined();
  RI_REQUIRE(!has_bias || bias.numel() == out_features, "linear: bias length mismatch");
  const std::size_t rows = x.numel() / in_features;

  std::vector<T> out(rows * out_features);
  const auto xv = x.data();
  const auto wv = weight.data();
  detail::gemm(false, true, rows, out_features, in_features, T(1), xv.data(), in_features,
               wv.data(), in_features, T(0), out.data(), out_features);
  if (has_bias) {
    const auto bv = bias.data();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t o = 0; o < out_features; ++o) out[r * out_features + o] += bv[o];
    }
  }
  Shape shape = x.shape();
  shape.back() = out_features;
  std::vector<Tensor<T>> inputs{x, weight};
  if (has_bias) inputs.push_back(bias);
  return make_result<T>(std::move(shape), std::move(out), "linear", inputs,
                        [rows, in_features, out_features, has_bias](Node<T>& n) {
                          auto& X = *n.inputs[0];
                          auto& W = *n.inputs[1];
                          if (X.requires_grad) {
                            detail::gemm(false, false, rows, in_features, out_features, T(1),
                                         n.grad.data(), out_features, W.value.data(), in_features,
                                         T(1), X.grad_buffer(), in_features);
                          }
                          if (W.requires_grad) {
                            detail::gemm(true, false, out_features, in_features, rows, T(1),
                                         n.grad.data(), out_features, X.value.data(), in_features,
                                         T(1), W.grad_buffer(), in_features);
                          }
                          if (has_bias && n.inputs[2]->requires_grad) {
                            T* gb = n.inputs[2]->grad_buffer();
                            for (std::size_t r = 0; r < rows; ++r) {
                              for (std::size_t o = 0; o < out_features; ++o) {
                                gb[o] += n.grad[r * out_features + o];
                              }
                            }
                          }
                        });
}

#define RI_INSTANTIATE(T)                                                                     \
  template Tensor<T> sum(const Tensor<T>&);                                                   \
  template Tensor<T> mean(const Tensor<T>&);                                                  \
  template Tensor<T> sum(const Tensor<T>&, int);                                              \
  template Tensor<T> mean(const Tensor<T>&, int);                                             \
  template Tensor<T> softmax(const Tensor<T>&, int);                                          \
  template Tensor<T> layer_norm(const Tensor<T>&, int, const Tensor<T>&, const Tensor<T>&, T); \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&, bool, bool);                  \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);

RI_INSTANTIATE(float)
RI_INSTANTIATE(double)
#undef RI_INSTANTIATE

}  // namespace refinpaint::ad

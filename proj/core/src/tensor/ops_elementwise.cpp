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

#include "refinpaint/errors.hpp"
#include "refinpaint/tensor/ops.hpp"

namespace refinpaint::ad {

using detail::make_result;
using detail::Node;

namespace {

template <typename T, typename F, typename D>
Tensor<T> unary(const Tensor<T>& x, const char* name, F f, D derivative) {
  const auto xv = x.data();
  std::vector<T> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  return make_result<T>(x.shape(), std::move(out), name, {x}, [derivative](Node<T>& n) {
    auto& in = *n.inputs[0];
    if (!in.requires_grad) return;
    T* g = in.grad_buffer();
    for (std::size_t i = 0; i < n.value.size(); ++i) {
      g[i] += n.grad[i] * derivative(in.value[i], n.value[i]);
    }
  });
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  RI_REQUIRE(a.shape() == b.shape(), op, ": shape mismatch ", to_string(a.shape()), " vs ",
             to_string(b.shape()));
}

template <typename T>
void accumulate(Node<T>& target, const std::vector<T>& g, T factor) {
  if (!target.requires_grad) return;
  T* dst = target.grad_buffer();
  for (std::size_t i = 0; i < g.size(); ++i) dst[i] += factor * g[i];
}

template <typename T>
T normal_cdf(T x) {
  return T(0.5) * (T(1) + std::erf(x / std::sqrt(T(2))));
}

template <typename T>
T normal_pdf(T x) {
  static const T inv_sqrt_2pi = T(1) / std::sqrt(T(2) * T(M_PI));
  return inv_sqrt_2pi * std::exp(T(-0.5) * x * x);
}

}  // namespace

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "add");
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<T> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return make_result<T>(a.shape(), std::move(out), "add", {a, b}, [](Node<T>& n) {
    accumulate(*n.inputs[0], n.grad, T(1));
    accumulate(*n.inputs[1], n.grad, T(1));
  });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "sub");
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<T> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return make_result<T>(a.shape(), std::move(out), "sub", {a, b}, [](Node<T>& n) {
    accumulate(*n.inputs[0], n.grad, T(1));
    accumulate(*n.inputs[1], n.grad, T(-1));
  });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "mul");
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<T> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return make_result<T>(a.shape(), std::move(out), "mul", {a, b}, [](Node<T>& n) {
    auto& x = *n.inputs[0];
    auto& y = *n.inputs[1];
    // Read both values before writing: a and b may be the same node.
    if (x.requires_grad) {
      T* g = x.grad_buffer();
      for (std::size_t i = 0; i < n.grad.size(); ++i) g[i] += n.grad[i] * y.value[i];
    }
    if (y.requires_grad) {
      T* g = y.grad_buffer();
      for (std::size_t i = 0; i < n.grad.size(); ++i) g[i] += n.grad[i] * x.value[i];
    }
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor) {
  return unary<T>(
      x, "scale", [factor](T v) { return v * factor; }, [factor](T, T) { return factor; });
}

template <typename T>
Tensor<T> add_scalar(const Tensor<T>& x, T value) {
  return unary<T>(
      x, "add_scalar", [value](T v) { return v + value; }, [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> abs(const Tensor<T>& x) {
  return unary<T>(
      x, "abs", [](T v) { return std::abs(v); },
      [](T v, T) { return v > 0 ? T(1) : (v < 0 ? T(-1) : T(0)); });
}

template <typename T>
Tensor<T> square(const Tensor<T>& x) {
  return unary<T>(
      x, "square", [](T v) { return v * v; }, [](T v, T) { return T(2) * v; });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  return unary<T>(
      x, "relu", [](T v) { return v > 0 ? v : T(0); },
      [](T v, T) { return v > 0 ? T(1) : T(0); });
}

template <typename T>
Tensor<T> gelu(const Tensor<T>& x) {
  return unary<T>(
      x, "gelu", [](T v) { return v * normal_cdf(v); },
      [](T v, T) { return normal_cdf(v) + v * normal_pdf(v); });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  return unary<T>(
      x, "sigmoid",
      [](T v) {
        if (v >= 0) return T(1) / (T(1) + std::exp(-v));
        const T e = std::exp(v);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> tanh(const Tensor<T>& x) {
  return unary<T>(
      x, "tanh", [](T v) { return std::tanh(v); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Tensor<T> add_bias(const Tensor<T>& x, const Tensor<T>& bias, int axis) {
  const auto& s = x.shape();
  const auto r = static_cast<int>(s.size());
  if (axis < 0) axis += r;
  RI_REQUIRE(axis >= 0 && axis < r, "add_bias: axis out of range");
  RI_REQUIRE(bias.numel() == s[static_cast<std::size_t>(axis)], "add_bias: bias length ",
             bias.numel(), " does not match dimension ", s[static_cast<std::size_t>(axis)]);
  std::size_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= s[static_cast<std::size_t>(i)];
  for (int i = axis + 1; i < r; ++i) inner *= s[static_cast<std::size_t>(i)];
  const std::size_t channels = s[static_cast<std::size_t>(axis)];

  const auto xv = x.data();
  const auto bv = bias.data();
  std::vector<T> out(xv.size());
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t base = (o * channels + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) out[base + i] = xv[base + i] + bv[c];
    }
  }
  return make_result<T>(s, std::move(out), "add_bias", {x, bias},
                        [outer, channels, inner](Node<T>& n) {
                          accumulate(*n.inputs[0], n.grad, T(1));
                          auto& b = *n.inputs[1];
                          if (!b.requires_grad) return;
                          T* gb = b.grad_buffer();
                          for (std::size_t o = 0; o < outer; ++o) {
                            for (std::size_t c = 0; c < channels; ++c) {
                              const std::size_t base = (o * channels + c) * inner;
                              T acc = 0;
                              for (std::size_t i = 0; i < inner; ++i) acc += n.grad[base + i];
                              gb[c] += acc;
                            }
                          }
                        });
}

template <typename T>
Tensor<T> channel_scale(const Tensor<T>& x, const Tensor<T>& s) {
  const auto& xs = x.shape();
  RI_REQUIRE(xs.size() >= 2 && s.rank() == 2 && s.dim(0) == xs[0] && s.dim(1) == xs[1],
             "channel_scale: scale shape ", to_string(s.shape()), " incompatible with ",
             to_string(xs));
  const std::size_t planes = xs[0] * xs[1];
  const std::size_t inner = x.numel() / planes;
  const auto xv = x.data();
  const auto sv = s.data();
  std::vector<T> out(xv.size());
  for (std::size_t p = 0; p < planes; ++p) {
    for (std::size_t i = 0; i < inner; ++i) out[p * inner + i] = xv[p * inner + i] * sv[p];
  }
  return make_result<T>(xs, std::move(out), "channel_scale", {x, s}, [planes, inner](Node<T>& n) {
    auto& xin = *n.inputs[0];
    auto& sin = *n.inputs[1];
    if (xin.requires_grad) {
      T* g = xin.grad_buffer();
      for (std::size_t p = 0; p < planes; ++p) {
        for (std::size_t i = 0; i < inner; ++i) g[p * inner + i] += n.grad[p * inner + i] * sin.value[p];
      }
    }
    if (sin.requires_grad) {
      T* g = sin.grad_buffer();
      for (std::size_t p = 0; p < planes; ++p) {
        T acc = 0;
        for (std::size_t i = 0; i < inner; ++i) acc += n.grad[p * inner + i] * xin.value[p * inner + i];
        g[p] += acc;
      }
    }
  });
}

#define RI_INSTANTIATE(T)                                                          \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                      \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                      \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                      \
  template Tensor<T> scale(const Tensor<T>&, T);                                   \
  template Tensor<T> add_scalar(const Tensor<T>&, T);                              \
  template Tensor<T> abs(const Tensor<T>&);                                        \
  template Tensor<T> square(const Tensor<T>&);                                     \
  template Tensor<T> relu(const Tensor<T>&);                                       \
  template Tensor<T> gelu(const Tensor<T>&);                                       \
  template Tensor<T> sigmoid(const Tensor<T>&);                                    \
  template Tensor<T> tanh(const Tensor<T>&);                                       \
  template Tensor<T> add_bias(const Tensor<T>&, const Tensor<T>&, int);            \
  template Tensor<T> channel_scale(const Tensor<T>&, const Tensor<T>&);

RI_INSTANTIATE(float)
RI_INSTANTIATE(double)
#undef RI_INSTANTIATE

}  // namespace refinpaint::ad

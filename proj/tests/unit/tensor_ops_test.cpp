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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "refinpaint/errors.hpp"
#include "refinpaint/tensor/ops.hpp"
#include "oracles.hpp"
#include "testing.hpp"

namespace refinpaint {
namespace {

using ad::Tensor;
using testing::random_tensor;

Tensor<double> T1(std::vector<double> v) {
  const auto n = v.size();
  return Tensor<double>::from_data({n}, std::move(v));
}

using testing::naive_conv;

TEST(TensorOps, ElementwiseValues) {
  auto a = T1({1, -2, 3});
  auto b = T1({4, 5, -6});
  EXPECT_EQ(ad::add(a, b).data()[1], 3);
  EXPECT_EQ(ad::sub(a, b).data()[2], 9);
  EXPECT_EQ(ad::mul(a, b).data()[0], 4);
  EXPECT_EQ(ad::scale(a, 2.0).data()[1], -4);
  EXPECT_EQ(ad::add_scalar(a, 0.5).data()[2], 3.5);
  EXPECT_EQ(ad::abs(a).data()[1], 2);
  EXPECT_EQ(ad::square(a).data()[1], 4);
  EXPECT_EQ(ad::relu(a).data()[1], 0);
  EXPECT_EQ(ad::relu(a).data()[2], 3);
}

TEST(TensorOps, GeluUsesExactNormalCdf) {
  auto y = ad::gelu(T1({0.0, 1.0, -1.0}));
  EXPECT_EQ(y.data()[0], 0.0);
  EXPECT_NEAR(y.data()[1], 0.8413447460685429, 1e-12);
  EXPECT_NEAR(y.data()[2], -0.15865525393145707, 1e-12);
}

TEST(TensorOps, SigmoidAndTanh) {
  auto s = ad::sigmoid(T1({0.0, 2.0}));
  EXPECT_EQ(s.data()[0], 0.5);
  EXPECT_NEAR(s.data()[1], 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
  EXPECT_NEAR(ad::tanh(T1({0.5})).item(), std::tanh(0.5), 1e-15);
}

TEST(TensorOps, SoftmaxKnownValues) {
  auto x = Tensor<double>::from_data({2, 3}, {1, 2, 3, 1000, 1000, 1000});
  auto y = ad::softmax(x, 1);
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  EXPECT_NEAR(y.at({0, 0}), std::exp(1.0) / z, 1e-15);
  EXPECT_NEAR(y.at({0, 2}), std::exp(3.0) / z, 1e-15);
  // Max subtraction keeps large logits finite.
  EXPECT_NEAR(y.at({1, 1}), 1.0 / 3.0, 1e-15);
}

TEST(TensorOps, LayerNormNormalizesSlices) {
  auto x = Tensor<double>::from_data({1, 4}, {1, 2, 3, 4});
  auto g = T1({1, 1, 1, 1});
  auto b = T1({0, 0, 0, 0});
  auto y = ad::layer_norm(x, 1, g, b, 0.0);
  const double sd = std::sqrt(1.25);
  EXPECT_NEAR(y.at({0, 0}), -1.5 / sd, 1e-12);
  EXPECT_NEAR(y.at({0, 3}), 1.5 / sd, 1e-12);

  auto g2 = T1({2, 2, 2, 2});
  auto b2 = T1({1, 1, 1, 1});
  auto y2 = ad::layer_norm(x, 1, g2, b2, 0.0);
  EXPECT_NEAR(y2.at({0, 1}), 2 * (-0.5 / sd) + 1, 1e-12);
}

TEST(TensorOps, LayerNormOverChannelAxis) {
  std::mt19937_64 rng(3);
  auto x = random_tensor({2, 5, 3, 4}, rng);
  auto y = ad::layer_norm(x, 1, Tensor<double>::full({5}, 1.0), Tensor<double>::zeros({5}), 0.0);
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t h = 0; h < 3; ++h)
      for (std::size_t w = 0; w < 4; ++w) {
        double m = 0, v = 0;
        for (std::size_t c = 0; c < 5; ++c) m += y.at({n, c, h, w});
        for (std::size_t c = 0; c < 5; ++c) v += y.at({n, c, h, w}) * y.at({n, c, h, w});
        EXPECT_NEAR(m / 5, 0, 1e-12);
        EXPECT_NEAR(v / 5, 1, 1e-9);
      }
}

TEST(TensorOps, MatmulMatchesNaive) {
  std::mt19937_64 rng(5);
  auto a = random_tensor({3, 4}, rng);
  auto b = random_tensor({4, 2}, rng);
  auto c = ad::matmul(a, b);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < 4; ++k) s += a.at({i, k}) * b.at({k, j});
      EXPECT_NEAR(c.at({i, j}), s, 1e-14);
    }
  auto bt = ad::transpose(b, 0, 1);
  EXPECT_LT(testing::max_abs_diff(ad::matmul(a, bt, false, true), c), 1e-14);
  auto at = ad::transpose(a, 0, 1);
  EXPECT_LT(testing::max_abs_diff(ad::matmul(at, b, true, false), c), 1e-14);
}

TEST(TensorOps, BatchedMatmul) {
  std::mt19937_64 rng(6);
  auto a = random_tensor({2, 3, 4}, rng);
  auto b = random_tensor({2, 4, 5}, rng);
  auto c = ad::matmul(a, b);
  ASSERT_EQ(c.shape(), (ad::Shape{2, 3, 5}));
  for (std::size_t n = 0; n < 2; ++n) {
    double s = 0;
    for (std::size_t k = 0; k < 4; ++k) s += a.at({n, 2, k}) * b.at({n, k, 4});
    EXPECT_NEAR(c.at({n, 2, 4}), s, 1e-14);
  }
}

TEST(TensorOps, LinearAddsBias) {
  auto x = Tensor<double>::from_data({1, 2}, {1, 2});
  auto w = Tensor<double>::from_data({3, 2}, {1, 0, 0, 1, 1, 1});
  auto b = T1({10, 20, 30});
  auto y = ad::linear(x, w, b);
  EXPECT_EQ(y.at({0, 0}), 11);
  EXPECT_EQ(y.at({0, 1}), 22);
  EXPECT_EQ(y.at({0, 2}), 33);
}

struct ConvCase {
  std::size_t k, stride, pad, dil;
};

TEST(TensorOps, Conv2dMatchesNestedLoops) {
  std::mt19937_64 rng(7);
  for (auto c : {ConvCase{3, 1, 1, 1}, ConvCase{3, 2, 1, 1}, ConvCase{7, 4, 3, 1}, ConvCase{3, 1, 2, 2},
                 ConvCase{1, 1, 0, 1}, ConvCase{2, 2, 0, 1}, ConvCase{3, 1, 4, 4}}) {
    auto x = random_tensor({2, 3, 9, 8}, rng);
    auto w = random_tensor({4, 3, c.k, c.k}, rng);
    auto b = random_tensor({4}, rng);
    ad::Conv2dOptions o;
    o.stride = {c.stride, c.stride};
    o.padding = {c.pad, c.pad};
    o.dilation = {c.dil, c.dil};
    auto y = ad::conv2d(x, w, b, o);
    const auto expect = naive_conv(x, w, b, o);
    ASSERT_EQ(y.numel(), expect.size());
    EXPECT_LT(testing::max_abs_diff(y.data(), expect), 1e-12) << "kernel " << c.k << " stride " << c.stride;
  }
}

TEST(TensorOps, ConvOutputSize) {
  EXPECT_EQ(ad::conv_output_size(256, 7, 4, 3, 1), 64u);
  EXPECT_EQ(ad::conv_output_size(64, 3, 2, 1, 1), 32u);
  EXPECT_EQ(ad::conv_output_size(10, 3, 1, 2, 2), 10u);
}

TEST(TensorOps, ShapeOps) {
  std::mt19937_64 rng(8);
  auto x = random_tensor({2, 3, 4, 5}, rng);
  auto p = ad::permute(x, {0, 2, 3, 1});
  EXPECT_EQ(p.at({1, 2, 3, 0}), x.at({1, 0, 2, 3}));
  auto tok = ad::to_tokens(x);
  ASSERT_EQ(tok.shape(), (ad::Shape{2, 20, 3}));
  EXPECT_EQ(tok.at({1, 2 * 5 + 3, 1}), x.at({1, 1, 2, 3}));
  EXPECT_EQ(ad::from_tokens(tok, 4, 5).data()[77], x.data()[77]);
  auto cat = ad::concat<double>({x, x}, 1);
  EXPECT_EQ(cat.dim(1), 6u);
  EXPECT_EQ(cat.at({0, 4, 1, 1}), x.at({0, 1, 1, 1}));
  auto s = ad::slice(cat, 1, 2, 3);
  EXPECT_EQ(s.at({1, 0, 3, 4}), x.at({1, 2, 3, 4}));
  EXPECT_EQ(s.at({1, 1, 3, 4}), x.at({1, 0, 3, 4}));
  auto r = ad::reshape(x, {6, 20});
  EXPECT_EQ(r.at({5, 19}), x.data()[119]);
}

TEST(TensorOps, Reductions) {
  auto x = Tensor<double>::from_data({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(ad::sum(x).item(), 21);
  EXPECT_EQ(ad::mean(x).item(), 3.5);
  auto s0 = ad::sum(x, 0);
  EXPECT_EQ(s0.shape(), (ad::Shape{3}));
  EXPECT_EQ(s0.data()[2], 9);
  auto m1 = ad::mean(x, 1);
  EXPECT_EQ(m1.data()[1], 5);
}

TEST(TensorOps, BiasAndChannelScale) {
  auto x = Tensor<double>::full({1, 2, 2, 2}, 1.0);
  auto y = ad::add_bias(x, T1({1, 2}), 1);
  EXPECT_EQ(y.at({0, 1, 1, 0}), 3);
  auto s = Tensor<double>::from_data({1, 2}, {0.5, 4});
  auto z = ad::channel_scale(x, s);
  EXPECT_EQ(z.at({0, 0, 1, 1}), 0.5);
  EXPECT_EQ(z.at({0, 1, 0, 1}), 4);
}

TEST(TensorOps, UpsampleAndPool) {
  auto x = Tensor<double>::from_data({1, 1, 2, 2}, {1, 2, 3, 4});
  auto u = ad::upsample_nearest2x(x);
  ASSERT_EQ(u.shape(), (ad::Shape{1, 1, 4, 4}));
  EXPECT_EQ(u.at({0, 0, 1, 1}), 1);
  EXPECT_EQ(u.at({0, 0, 3, 2}), 4);
  EXPECT_LT(testing::max_abs_diff(ad::avg_pool2d(u, 2), x), 1e-15);
  EXPECT_EQ(ad::avg_pool2d(x, 2).item(), 2.5);
}

TEST(TensorOps, BilinearInterpolation) {
  const double plane[4] = {0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(ad::bilinear_at(plane, 2, 2, 0.5, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(ad::bilinear_at(plane, 2, 2, 1.0, 1.0), 3.0);
  // Half outside: zero neighbours contribute nothing.
  EXPECT_DOUBLE_EQ(ad::bilinear_at(plane, 2, 2, 1.5, 1.0), 1.5);
  EXPECT_DOUBLE_EQ(ad::bilinear_at(plane, 2, 2, -2.0, 0.0), 0.0);
}

TEST(TensorOps, ShapeMismatchesThrow) {
  auto a = T1({1, 2});
  auto b = T1({1, 2, 3});
  EXPECT_THROW(ad::add(a, b), ContractViolation);
  EXPECT_THROW(ad::mul(a, b), ContractViolation);
  EXPECT_THROW(ad::matmul(Tensor<double>::zeros({2, 3}), Tensor<double>::zeros({2, 3})), ContractViolation);
  EXPECT_THROW(ad::reshape(a, {3}), ContractViolation);
  EXPECT_THROW(ad::conv2d(Tensor<double>::zeros({1, 2, 4, 4}), Tensor<double>::zeros({1, 3, 3, 3}),
                          Tensor<double>()),
               ContractViolation);
  EXPECT_THROW(ad::add_bias(Tensor<double>::zeros({2, 3}), a, 1), ContractViolation);
}

TEST(Autodiff, GradientsAccumulateAcrossUses) {
  auto x = Tensor<double>::from_data({2}, {3, -1}, true);
  // d/dx sum(x*x + x) = 2x + 1
  ad::sum(ad::add(ad::mul(x, x), x)).backward();
  EXPECT_EQ(x.grad()[0], 7);
  EXPECT_EQ(x.grad()[1], -1);
  ad::sum(x).backward();
  EXPECT_EQ(x.grad()[0], 8);
  x.zero_grad();
  EXPECT_EQ(x.grad()[0], 0);
}

TEST(Autodiff, NoGradGuardSkipsRecording) {
  auto x = Tensor<double>::from_data({1}, {2}, true);
  Tensor<double> y;
  {
    ad::NoGradGuard guard;
    y = ad::mul(x, x);
  }
  EXPECT_FALSE(y.requires_grad());
  EXPECT_TRUE(ad::GradMode::enabled());
  auto z = ad::mul(x, x);
  EXPECT_TRUE(z.requires_grad());
}

TEST(Autodiff, DetachCutsHistory) {
  auto x = Tensor<double>::from_data({1}, {2}, true);
  auto y = ad::mul(x, x).detach();
  EXPECT_FALSE(y.requires_grad());
  auto z = ad::mul(ad::mul(x, x), y);
  z.backward();
  // d/dx (x^2 * const 4) = 8x = 16
  EXPECT_EQ(x.grad()[0], 16);
}

TEST(Autodiff, DeepChainDoesNotOverflowStack) {
  auto x = Tensor<double>::from_data({1}, {1}, true);
  auto y = x;
  for (int i = 0; i < 20000; ++i) y = ad::add_scalar(y, 0.0);
  y.backward();
  EXPECT_EQ(x.grad()[0], 1);
}

TEST(Autodiff, FloatAndDoubleAgree) {
  std::mt19937_64 rng(9);
  auto xd = random_tensor({1, 2, 5, 5}, rng);
  auto wd = random_tensor({3, 2, 3, 3}, rng);
  std::vector<float> xf(xd.data().begin(), xd.data().end());
  std::vector<float> wf(wd.data().begin(), wd.data().end());
  auto yf = ad::conv2d(Tensor<float>::from_data(xd.shape(), xf), Tensor<float>::from_data(wd.shape(), wf),
                       Tensor<float>());
  auto yd = ad::conv2d(xd, wd, Tensor<double>());
  for (std::size_t i = 0; i < yd.numel(); ++i) EXPECT_NEAR(yf.data()[i], yd.data()[i], 1e-5);
}

}  // namespace
}  // namespace refinpaint

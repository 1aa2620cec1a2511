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
#include "refinpaint/tensor/checkpoint.hpp"
#include "refinpaint/loss/losses.hpp"
#include "testing.hpp"

namespace refinpaint {
namespace {

using ad::Tensor;
using testing::random_tensor;

// Two fixed "stages": the image itself and its 2x2 average pool.
class PoolingExtractor final : public loss::FeatureExtractor<double> {
 public:
  std::size_t stage_count() const override { return 2; }
  std::vector<Tensor<double>> features(const Tensor<double>& x) const override {
    return {x, ad::avg_pool2d(x, 2)};
  }
};

double mean_abs_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / double(a.size());
}

// Gram matrices of every image in a [N,C,H,W] buffer, flattened.
std::vector<double> gram_loop(const Tensor<double>& f) {
  const auto N = f.dim(0), C = f.dim(1), HW = f.dim(2) * f.dim(3);
  std::vector<double> g(N * C * C, 0.0);
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t i = 0; i < C; ++i)
      for (std::size_t j = 0; j < C; ++j) {
        double s = 0;
        for (std::size_t p = 0; p < HW; ++p) s += f.data()[(n * C + i) * HW + p] * f.data()[(n * C + j) * HW + p];
        g[(n * C + i) * C + j] = s / double(C * HW);
      }
  return g;
}

TEST(Losses, DefaultWeights) {
  loss::LossWeights w;
  EXPECT_EQ(w.l1, 1.0);
  EXPECT_EQ(w.perceptual, 0.1);
  EXPECT_EQ(w.style, 250.0);
}

TEST(Losses, L1IsMeanAbsoluteError) {
  auto a = Tensor<double>::from_data({4}, {1, 2, 3, 4});
  auto b = Tensor<double>::from_data({4}, {0, 2, 5, 4});
  EXPECT_EQ(loss::l1_loss(a, b).item(), 0.75);
}

TEST(Losses, GramMatrixMatchesLoop) {
  std::mt19937_64 rng(1);
  auto f = random_tensor({2, 3, 4, 5}, rng);
  EXPECT_LT(testing::max_abs_diff(loss::gram_matrix(f).data(), gram_loop(f)), 1e-15);
  auto single = ad::reshape(ad::slice(f, 0, 1, 1), {3, 4, 5});
  auto g = loss::gram_matrix(single);
  EXPECT_EQ(g.shape(), (ad::Shape{3, 3}));
  const auto all = gram_loop(f);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(g.data()[i], all[9 + i], 1e-15);
}

TEST(Losses, ComponentsMatchHandComputation) {
  std::mt19937_64 rng(2);
  PoolingExtractor fx;
  auto out = random_tensor({2, 3, 4, 4}, rng);
  auto tgt = random_tensor({2, 3, 4, 4}, rng);
  const auto pout = ad::avg_pool2d(out, 2), ptgt = ad::avg_pool2d(tgt, 2);

  const double l1 = mean_abs_diff(out.data(), tgt.data());
  const double perceptual = l1 + mean_abs_diff(pout.data(), ptgt.data());
  const double style = 0.5 * (mean_abs_diff(gram_loop(out), gram_loop(tgt)) +
                              mean_abs_diff(gram_loop(pout), gram_loop(ptgt)));

  auto j = loss::joint_loss(out, tgt, fx);
  EXPECT_NEAR(j.l1.item(), l1, 1e-15);
  EXPECT_NEAR(j.perceptual.item(), perceptual, 1e-15);
  EXPECT_NEAR(j.style.item(), style, 1e-15);
  EXPECT_EQ(j.total.item(), loss::combine_losses(j.l1.item(), j.perceptual.item(), j.style.item()));
  EXPECT_NEAR(j.total.item(), l1 + 0.1 * perceptual + 250 * style, 1e-12);
}

TEST(Losses, CustomWeightsCombineLinearly) {
  std::mt19937_64 rng(3);
  PoolingExtractor fx;
  auto out = random_tensor({1, 2, 4, 4}, rng);
  auto tgt = random_tensor({1, 2, 4, 4}, rng);
  const loss::LossWeights w{0.5, 2.0, 10.0};
  auto j = loss::joint_loss(out, tgt, fx, w);
  EXPECT_EQ(j.total.item(), loss::combine_losses(j.l1.item(), j.perceptual.item(), j.style.item(), w));
  auto only_l1 = loss::joint_loss(out, tgt, fx, {1, 0, 0});
  EXPECT_EQ(only_l1.total.item(), only_l1.l1.item());
}

TEST(Losses, VanishOnIdenticalInputs) {
  std::mt19937_64 rng(4);
  loss::ConvPyramidExtractor<double> fx;
  auto x = random_tensor({1, 3, 32, 32}, rng);
  auto j = loss::joint_loss(x, x.clone(), fx);
  EXPECT_EQ(j.l1.item(), 0.0);
  EXPECT_EQ(j.perceptual.item(), 0.0);
  EXPECT_EQ(j.style.item(), 0.0);
  EXPECT_EQ(j.total.item(), 0.0);
}

TEST(Losses, RejectMismatchedShapesAndNegativeWeights) {
  PoolingExtractor fx;
  auto a = Tensor<double>::zeros({1, 1, 4, 4});
  auto b = Tensor<double>::zeros({1, 1, 4, 2});
  EXPECT_THROW(loss::l1_loss(a, b), ContractViolation);
  EXPECT_THROW(loss::joint_loss(a, b, fx), ContractViolation);
  EXPECT_THROW(loss::joint_loss(a, a, fx, {1, -1, 0}), ContractViolation);
}

TEST(FeatureExtractor, PyramidStagesHalveResolution) {
  loss::ConvPyramidExtractor<float> fx;
  EXPECT_EQ(fx.stage_count(), 5u);
  auto f = fx.features(Tensor<float>::zeros({2, 3, 64, 64}));
  ASSERT_EQ(f.size(), 5u);
  const std::size_t channels[5] = {16, 32, 64, 64, 64};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(f[i].shape(), (ad::Shape{2, channels[i], 64u >> i, 64u >> i})) << i;
  }
}

TEST(FeatureExtractor, IsFrozenAndLoadable) {
  loss::ConvPyramidExtractor<float> fx(99);
  for (const auto& p : fx.parameters()) EXPECT_FALSE(p.tensor.requires_grad()) << p.name;
  const auto dir = testing::scratch_dir("extractor");
  ad::save_parameters(dir / "fx.trkt", fx.parameters());
  auto loaded = loss::ConvPyramidExtractor<float>::from_checkpoint(dir / "fx.trkt");
  auto x = Tensor<float>::full({1, 3, 32, 32}, 0.25f);
  auto a = fx.features(x), b = loaded.features(x);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(testing::max_abs_diff(a[i], b[i]), 0.0);
}

}  // namespace
}  // namespace refinpaint

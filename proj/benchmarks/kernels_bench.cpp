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

#include <benchmark/benchmark.h>

#include <random>

#include "refinpaint/data/masks.hpp"
#include "refinpaint/loss/losses.hpp"
#include "refinpaint/metrics/metrics.hpp"
#include "refinpaint/model/inpainter.hpp"
#include "refinpaint/nn/attention.hpp"
#include "refinpaint/tensor/optim.hpp"

namespace {

using refinpaint::ad::Tensor;
namespace ad = refinpaint::ad;
namespace nn = refinpaint::nn;
namespace model = refinpaint::model;
namespace loss = refinpaint::loss;
namespace data = refinpaint::data;

Tensor<float> random(ad::Shape shape, std::uint64_t seed, bool grad = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> d(-1, 1);
  std::vector<float> v(ad::element_count(shape));
  for (auto& x : v) x = d(rng);
  return Tensor<float>::from_data(std::move(shape), std::move(v), grad);
}

ad::Conv2dOptions same3() {
  ad::Conv2dOptions o;
  o.padding = {1, 1};
  return o;
}

void BM_Conv2dForward(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto ch = static_cast<std::size_t>(state.range(1));
  auto x = random({1, ch, side, side}, 1);
  auto w = random({ch, ch, 3, 3}, 2);
  auto b = random({ch}, 3);
  ad::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(ad::conv2d(x, w, b, same3()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side * ch * ch * 9));
}
BENCHMARK(BM_Conv2dForward)->Args({64, 32})->Args({32, 64})->Args({16, 128})->Unit(benchmark::kMicrosecond);

void BM_DeformConvForwardBackward(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto ch = static_cast<std::size_t>(state.range(1));
  auto x = random({1, ch, side, side}, 1, true);
  auto off = random({1, 18, side, side}, 4, true);
  auto w = random({ch, ch, 3, 3}, 2, true);
  auto b = random({ch}, 3, true);
  for (auto _ : state) {
    auto y = ad::sum(ad::deform_conv2d(x, off, w, b, same3()));
    y.backward();
    x.zero_grad();
    off.zero_grad();
    w.zero_grad();
    b.zero_grad();
  }
}
BENCHMARK(BM_DeformConvForwardBackward)->Args({16, 32})->Args({32, 32})->Unit(benchmark::kMillisecond);

void BM_SelfAttention(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto sr = static_cast<std::size_t>(state.range(1));
  nn::Rng rng(5);
  nn::MultiHeadAttention<float> attn({64, 2, sr}, rng);
  auto x = random({1, side * side, 64}, 6);
  ad::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(nn::self_attention(attn, x, side, side).tokens);
}
BENCHMARK(BM_SelfAttention)->Args({32, 4})->Args({32, 1})->Args({16, 1})->Unit(benchmark::kMicrosecond);

void BM_ToyInpaintForward(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  model::Inpainter<float> net(model::ModelConfig::toy(), 7);
  auto image = random({1, 3, side, side}, 8), reference = random({1, 3, side, side}, 9);
  data::MaskOptions opt;
  opt.width = opt.height = side;
  auto mask = data::mask_to_tensor<float>(data::gen_irregular_mask(3, false, 1, opt).mask);
  ad::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(net.inpaint(image, mask, reference).completed);
}
BENCHMARK(BM_ToyInpaintForward)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ToyTrainStep(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  model::Inpainter<float> net(model::ModelConfig::toy(), 7);
  const loss::ConvPyramidExtractor<float> fx;
  ad::Adam<float> adam(net.parameters(), ad::AdamOptions{});
  auto image = random({1, 3, side, side}, 8), reference = random({1, 3, side, side}, 9);
  data::MaskOptions opt;
  opt.width = opt.height = side;
  auto mask = data::mask_to_tensor<float>(data::gen_irregular_mask(4, false, 1, opt).mask);
  for (auto _ : state) {
    auto out = net.inpaint(image, mask, reference);
    auto l = loss::joint_loss(out.generated, image, fx);
    adam.zero_grad();
    l.total.backward();
    adam.step();
  }
}
BENCHMARK(BM_ToyTrainStep)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_MaskGeneration(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(data::gen_irregular_mask(5, seed % 2 == 0, seed++));
}
BENCHMARK(BM_MaskGeneration)->Unit(benchmark::kMicrosecond);

void BM_Ssim256(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> d(0, 255);
  data::Image a(256, 256, 3), b(256, 256, 3);
  for (auto& p : a.pixels) p = static_cast<std::uint8_t>(d(rng));
  for (auto& p : b.pixels) p = static_cast<std::uint8_t>(d(rng));
  for (auto _ : state) benchmark::DoNotOptimize(refinpaint::metrics::ssim(a, b));
}
BENCHMARK(BM_Ssim256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

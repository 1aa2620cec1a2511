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

#include <set>

#include "refinpaint/data/image.hpp"
#include "refinpaint/errors.hpp"
#include "refinpaint/model/inpainter.hpp"
#include "grad_cases.hpp"
#include "testing.hpp"

namespace refinpaint {
namespace {

using ad::Tensor;
using model::ModelConfig;
using model::Variant;

Tensor<float> stripe_mask(std::size_t size) {
  std::vector<float> v(size * size);
  for (std::size_t y = 0; y < size; ++y)
    for (std::size_t x = 0; x < size; ++x) v[y * size + x] = (x / 8 + y / 16) % 3 == 0 ? 1.0f : 0.0f;
  return Tensor<float>::from_data({1, 1, size, size}, v);
}

class ToyModel : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    net = new model::Inpainter<float>(ModelConfig::toy(), 42);
    image = data::image_to_tensor<float>(testing::synthetic_scene(256, 256));
    reference = data::image_to_tensor<float>(testing::synthetic_scene(256, 256, 5, 3));
    mask = stripe_mask(256);
    ad::NoGradGuard g;
    encoded = new model::EncoderOutput<float>(net->encode(model::apply_mask(image, mask), mask, reference));
    output = new model::InpaintOutput<float>(net->inpaint(image, mask, reference));
  }
  static void TearDownTestSuite() {
    delete net;
    delete encoded;
    delete output;
  }
  static inline model::Inpainter<float>* net = nullptr;
  static inline model::EncoderOutput<float>* encoded = nullptr;
  static inline model::InpaintOutput<float>* output = nullptr;
  static inline Tensor<float> image, reference, mask;
};

TEST_F(ToyModel, EncoderEmitsFourScales) {
  ASSERT_EQ(encoded->scales.size(), 4u);
  const std::size_t sides[4] = {64, 32, 16, 8};
  const auto& dims = net->config().embed_dims;
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(encoded->scales[i].output.shape(), (ad::Shape{1, dims[i], sides[i], sides[i]})) << i;
  }
}

TEST_F(ToyModel, ReferenceStagesExposeIntermediates) {
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& s = encoded->scales[i];
    const auto side = 64u >> i;
    const auto C = net->config().embed_dims[i];
    EXPECT_EQ(s.offsets.shape(), (ad::Shape{1, 18, side, side}));
    EXPECT_EQ(s.coarse_aligned.shape(), (ad::Shape{1, C, side, side}));
    EXPECT_EQ(s.aligned.shape(), (ad::Shape{1, C, side, side}));
    EXPECT_EQ(s.mini_aligned.shape(), (ad::Shape{1, C, side / 2, side / 2}));
    EXPECT_EQ(s.reference_features.shape(), (ad::Shape{1, C, side, side}));
  }
  EXPECT_FALSE(encoded->scales[3].aligned.defined());
}

TEST_F(ToyModel, OutputIsFullResolutionRgb) {
  EXPECT_EQ(output->generated.shape(), (ad::Shape{1, 3, 256, 256}));
  EXPECT_EQ(output->completed.shape(), (ad::Shape{1, 3, 256, 256}));
  for (auto v : output->generated.data()) {
    EXPECT_GE(v, -1.0f);
    EXPECT_LE(v, 1.0f);
  }
}

TEST_F(ToyModel, KnownPixelsAreCopiedExactly) {
  const auto m = mask.data();
  const auto c = output->completed.data();
  const auto in = image.data();
  const std::size_t plane = 256 * 256;
  std::size_t checked = 0;
  for (std::size_t ch = 0; ch < 3; ++ch)
    for (std::size_t i = 0; i < plane; ++i) {
      if (m[i] != 0) continue;
      ASSERT_EQ(c[ch * plane + i], in[ch * plane + i]);
      ++checked;
    }
  EXPECT_GT(checked, 0u);
}

TEST_F(ToyModel, EmptyMaskRoundTripsBitExactly) {
  const auto img = testing::synthetic_scene(256, 256, 1, 2, 9);
  auto zero = Tensor<float>::zeros({1, 1, 256, 256});
  ad::NoGradGuard g;
  auto out = net->inpaint(data::image_to_tensor<float>(img), zero, reference);
  EXPECT_EQ(data::tensor_to_image(out.completed).pixels, img.pixels);
}

TEST(Model, RejectsSizesOffTheGrid) {
  auto cfg = testing::tiny_model_config();
  model::Inpainter<float> net(cfg, 1);
  auto bad = Tensor<float>::zeros({1, 3, 48, 64});
  try {
    net.inpaint(bad, Tensor<float>::zeros({1, 1, 48, 64}), bad);
    FAIL();
  } catch (const SizingError& e) {
    EXPECT_NE(std::string(e.what()).find("height 48"), std::string::npos) << e.what();
  }
  auto ok = Tensor<float>::zeros({1, 3, 32, 32});
  EXPECT_THROW(net.inpaint(ok, Tensor<float>::zeros({1, 1, 32, 16}), ok), ContractViolation);
  EXPECT_THROW(net.inpaint(ok, Tensor<float>::zeros({1, 1, 32, 32}), Tensor<float>::zeros({1, 3, 64, 64})),
               ContractViolation);
}

std::set<std::string> names_of(const ad::ParameterList<float>& p) {
  std::set<std::string> s;
  for (const auto& e : p) s.insert(e.name);
  return s;
}

TEST(Model, VariantsSelectParameterSubsets) {
  auto cfg = testing::tiny_model_config();
  model::Inpainter<float> net(cfg, 3);
  std::vector<std::set<std::string>> sets;
  for (auto v : {Variant::kBasic, Variant::kAlignWithoutHarmonization, Variant::kAlign, Variant::kFull}) {
    net.set_variant(v);
    sets.push_back(names_of(net.parameters()));
  }
  for (std::size_t i = 1; i < sets.size(); ++i) {
    EXPECT_LT(sets[i - 1].size(), sets[i].size());
    EXPECT_TRUE(std::includes(sets[i].begin(), sets[i].end(), sets[i - 1].begin(), sets[i - 1].end()));
  }
  for (const auto& n : sets[0]) EXPECT_EQ(n.rfind("ref.", 0), std::string::npos) << n;
  EXPECT_EQ(sets.back(), names_of(net.all_parameters()));
  EXPECT_TRUE(sets[2].count("ref.0.harmonize.fuse1.weight"));
  EXPECT_FALSE(sets[1].count("ref.0.harmonize.fuse1.weight"));
  EXPECT_TRUE(sets[3].count("ref.2.attn.q.weight"));
  EXPECT_FALSE(sets[2].count("ref.2.attn.q.weight"));
}

TEST(Model, VariantsShareInitialisation) {
  auto cfg = testing::tiny_model_config();
  auto basic_cfg = cfg;
  basic_cfg.variant = Variant::kBasic;
  model::Inpainter<float> full(cfg, 5), basic(basic_cfg, 5);
  auto fp = full.all_parameters(), bp = basic.all_parameters();
  ASSERT_EQ(fp.size(), bp.size());
  for (std::size_t i = 0; i < fp.size(); ++i) {
    ASSERT_EQ(fp[i].name, bp[i].name);
    EXPECT_EQ(testing::max_abs_diff(fp[i].tensor, bp[i].tensor), 0.0) << fp[i].name;
  }
}

TEST(Model, SeedsDetermineWeights) {
  auto cfg = testing::tiny_model_config();
  model::Inpainter<float> a(cfg, 7), b(cfg, 7), c(cfg, 8);
  auto pa = a.parameters(), pb = b.parameters(), pc = c.parameters();
  double same = 0, diff = 0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    same += testing::max_abs_diff(pa[i].tensor, pb[i].tensor);
    diff += testing::max_abs_diff(pa[i].tensor, pc[i].tensor);
  }
  EXPECT_EQ(same, 0.0);
  EXPECT_GT(diff, 0.0);
}

TEST(Model, BasicVariantIgnoresReference) {
  auto cfg = testing::tiny_model_config();
  cfg.variant = Variant::kBasic;
  model::Inpainter<float> net(cfg, 9);
  auto img = data::image_to_tensor<float>(testing::synthetic_scene(32, 32));
  auto m = stripe_mask(32);
  auto r1 = data::image_to_tensor<float>(testing::synthetic_scene(32, 32, 3, 3));
  auto r2 = data::image_to_tensor<float>(testing::synthetic_scene(32, 32, 9, 1, 4));
  ad::NoGradGuard g;
  EXPECT_EQ(testing::max_abs_diff(net.inpaint(img, m, r1).generated, net.inpaint(img, m, r2).generated), 0.0);
  cfg.variant = Variant::kFull;
  model::Inpainter<float> full(cfg, 9);
  EXPECT_GT(testing::max_abs_diff(full.inpaint(img, m, r1).generated, full.inpaint(img, m, r2).generated), 0.0);
}

TEST(Model, ParameterCountOfPresets) {
  model::Inpainter<float> toy(ModelConfig::toy(), 0);
  const auto n = ad::parameter_count(toy.parameters());
  EXPECT_GT(n, 1'000'000u);
  EXPECT_LT(n, 10'000'000u);
}

TEST(ModelConfig, SerializeRoundTrip) {
  auto c = ModelConfig::full();
  c.variant = Variant::kAlign;
  c.depths = {1, 1, 1, 1};
  const auto back = ModelConfig::parse(c.serialize());
  EXPECT_EQ(back.serialize(), c.serialize());
  EXPECT_EQ(back.variant, Variant::kAlign);
  EXPECT_EQ(back.embed_dims, (std::vector<std::size_t>{64, 128, 320, 512}));
}

TEST(ModelConfig, ProblemsAreEnumerated) {
  auto c = ModelConfig::toy();
  c.num_heads = {1, 2, 3, 8};
  c.deform_kernel = 2;
  c.tail_channels = {1, 2};
  const auto p = c.problems();
  EXPECT_EQ(p.size(), 3u);
  EXPECT_THROW(c.validate(), ContractViolation);
  EXPECT_TRUE(ModelConfig::toy().problems().empty());
  EXPECT_TRUE(ModelConfig::full().problems().empty());
}

TEST(ModelConfig, VariantNames) {
  for (auto v : {Variant::kBasic, Variant::kAlignWithoutHarmonization, Variant::kAlign, Variant::kFull}) {
    EXPECT_EQ(model::parse_variant(model::variant_name(v)), v);
  }
  EXPECT_THROW(model::parse_variant("nope"), std::exception);
}

}  // namespace
}  // namespace refinpaint

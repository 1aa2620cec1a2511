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

#include "refinpaint/model/inpainter.hpp"

#include <algorithm>
#include <string>

#include "refinpaint/errors.hpp"

namespace refinpaint::model {

namespace {

template <typename T>
Tensor<T> expand_mask(const Tensor<T>& mask, std::size_t channels) {
  if (channels == 1) return mask;
  return ad::concat<T>(std::vector<Tensor<T>>(channels, mask), 1);
}

bool uses_alignment(Variant v) { return v != Variant::kBasic; }
bool uses_harmonization(Variant v) { return v == Variant::kAlign || v == Variant::kFull; }
bool uses_refinement(Variant v) { return v == Variant::kFull; }

}  // namespace

template <typename T>
Tensor<T> apply_mask(const Tensor<T>& image, const Tensor<T>& mask) {
  RI_REQUIRE(image.rank() == 4 && mask.rank() == 4 && mask.dim(1) == 1 &&
                 mask.dim(0) == image.dim(0) && mask.dim(2) == image.dim(2) &&
                 mask.dim(3) == image.dim(3),
             "apply_mask: image ", ad::to_string(image.shape()), " and mask ",
             ad::to_string(mask.shape()), " are incompatible");
  auto keep = ad::add_scalar(ad::scale(expand_mask(mask, image.dim(1)), T(-1)), T(1));
  return ad::mul(image, keep);
}

template <typename T>
Inpainter<T>::Inpainter(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  nn::Rng rng(seed);
  const auto n = config_.num_scales();
  const auto& dims = config_.embed_dims;

  // Everything is always constructed in the same order so variants built from
  // one seed share the initial values of their common modules.
  for (std::size_t i = 0; i < n; ++i) {
    EncoderStage<T> s;
    nn::PatchEmbedConfig pe = i == 0 ? nn::PatchEmbedConfig{7, 4, 3, 4, dims[0]}
                                     : nn::PatchEmbedConfig{3, 2, 1, dims[i - 1], dims[i]};
    s.embed = nn::PatchEmbed<T>(pe, rng);
    nn::AttentionConfig ac{dims[i], config_.num_heads[i], config_.reduction_ratios[i]};
    for (std::size_t d = 0; d < config_.depths[i]; ++d) {
      s.main.emplace_back(ac, config_.mlp_ratio, rng);
    }
    stages.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < config_.ref_scales; ++i) {
    const auto c = dims[i];
    ReferenceStage<T> r;
    nn::PatchEmbedConfig pe = i == 0 ? nn::PatchEmbedConfig{7, 4, 3, 3, c}
                                     : nn::PatchEmbedConfig{3, 2, 1, dims[i - 1], c};
    r.embed = nn::PatchEmbed<T>(pe, rng);
    r.offsets = nn::OffsetEstimator<T>(c, config_.deform_kernel, rng);
    r.deform = nn::DeformableConv<T>(c, c, config_.deform_kernel, rng);
    r.harmonize = nn::PatchHarmonization<T>(c, config_.harmonize_reduction, rng);
    r.mini_aligned = nn::PatchEmbed<T>(nn::PatchEmbedConfig::mini(c, c), rng);
    r.mini_reference = nn::PatchEmbed<T>(nn::PatchEmbedConfig::mini(c, c), rng);
    nn::AttentionConfig ac{c, config_.num_heads[i],
                           std::max<std::size_t>(1, config_.reduction_ratios[i] / 2)};
    r.attention = nn::MultiHeadAttention<T>(ac, rng);
    r.ffb = nn::FeedForward<T>(c, config_.mlp_ratio, rng);
    r.upsample = nn::UpsampleConv<T>(c, c, rng);
    reference.push_back(std::move(r));
  }

  const auto& t = config_.tail_channels;
  nn::AttentionConfig dc{dims[n - 1], config_.num_heads[n - 1], config_.reduction_ratios[n - 1]};
  decoder.block = nn::TransformerBlock<T>(dc, config_.mlp_ratio, rng);
  decoder.ups.emplace_back(dims[n - 1], t[0], rng);
  decoder.ups.emplace_back(t[0], t[1], rng);
  decoder.residual.emplace_back(t[1] + dims[1], t[1], rng);
  decoder.ups.emplace_back(t[1], t[2], rng);
  decoder.residual.emplace_back(t[2] + dims[0], t[2], rng);
  decoder.ups.emplace_back(t[2], t[3], rng);
  decoder.residual.emplace_back(t[3], t[3], rng);
  decoder.ups.emplace_back(t[3], t[4], rng);
  decoder.residual.emplace_back(t[4], t[4], rng);
  decoder.head = nn::Conv2d<T>::same(t[4], 3, 3, rng);
}

template <typename T>
void Inpainter<T>::check_image_size(const Tensor<T>& x, const char* what) const {
  RI_REQUIRE(x.rank() == 4, what, " must be [N,C,H,W], got ", ad::to_string(x.shape()));
  const auto m = config_.size_multiple();
  const char* names[2] = {"height", "width"};
  for (int k = 0; k < 2; ++k) {
    if (x.dim(2 + k) % m != 0 || x.dim(2 + k) == 0) {
      throw SizingError(refinpaint::detail::concat_message(what, " ", names[k], " ", x.dim(2 + k),
                                                           " is not a multiple of ", m));
    }
  }
}

template <typename T>
Tensor<T> Inpainter<T>::ref_pa(std::size_t stage, const Tensor<T>& input_patches,
                               const Tensor<T>& reference_patches,
                               EncoderScaleState<T>* state) const {
  RI_REQUIRE(stage < reference.size(), "stage ", stage, " has no reference embedding");
  const auto& r = reference[stage];
  auto offsets = r.offsets(input_patches, reference_patches);
  auto coarse = r.deform(reference_patches, offsets);
  Tensor<T> aligned = uses_harmonization(config_.variant) ? r.harmonize(input_patches, coarse)
                                                          : ad::add(input_patches, coarse);
  if (state) {
    state->offsets = offsets;
    state->coarse_aligned = coarse;
    state->aligned = aligned;
  }
  return aligned;
}

template <typename T>
Tensor<T> Inpainter<T>::ref_pt(std::size_t stage, const Tensor<T>& aligned,
                               const Tensor<T>& reference_patches,
                               EncoderScaleState<T>* state) const {
  RI_REQUIRE(stage < reference.size(), "stage ", stage, " has no reference embedding");
  const auto& r = reference[stage];
  auto mga = r.mini_aligned(aligned);
  auto mref = r.mini_reference(reference_patches);
  const auto h = mga.dim(2), w = mga.dim(3);
  auto q = ad::to_tokens(mga);
  auto attended = nn::reference_attention(r.attention, q, ad::to_tokens(mref), h, w).tokens;
  auto refined = r.ffb(ad::add(attended, q));
  auto up = r.upsample(ad::from_tokens(refined, h, w));
  if (state) {
    state->mini_aligned = mga;
    state->mini_reference = mref;
    state->reference_features = up;
  }
  return up;
}

template <typename T>
Tensor<T> Inpainter<T>::main_pt(std::size_t stage, const Tensor<T>& input_patches) const {
  RI_REQUIRE(stage < stages.size(), "stage ", stage, " out of range");
  const auto h = input_patches.dim(2), w = input_patches.dim(3);
  auto tokens = ad::to_tokens(input_patches);
  for (const auto& block : stages[stage].main) tokens = block(tokens, h, w);
  return ad::from_tokens(tokens, h, w);
}

template <typename T>
EncoderOutput<T> Inpainter<T>::encode(const Tensor<T>& masked_image, const Tensor<T>& mask,
                                      const Tensor<T>& reference_image) const {
  check_image_size(masked_image, "input image");
  RI_REQUIRE(masked_image.dim(1) == 3, "input image must have 3 channels");
  RI_REQUIRE(mask.rank() == 4 && mask.dim(1) == 1 && mask.dim(0) == masked_image.dim(0) &&
                 mask.dim(2) == masked_image.dim(2) && mask.dim(3) == masked_image.dim(3),
             "mask must be [N,1,H,W] matching the image, got ", ad::to_string(mask.shape()));
  const auto v = config_.variant;
  if (uses_alignment(v)) {
    RI_REQUIRE(reference_image.defined() && reference_image.shape() == masked_image.shape(),
               "reference image must match the input image shape");
  }

  EncoderOutput<T> out;
  Tensor<T> x = ad::concat<T>({masked_image, mask}, 1);
  Tensor<T> ref = reference_image;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    EncoderScaleState<T> s;
    s.input_patches = stages[i].embed(x);
    s.main_features = main_pt(i, s.input_patches);
    s.output = s.main_features;
    if (uses_alignment(v) && i < reference.size()) {
      ref = reference[i].embed(ref);
      s.reference_patches = ref;
      auto aligned = ref_pa(i, s.input_patches, ref, &s);
      Tensor<T> fused = uses_refinement(v) ? ref_pt(i, aligned, ref, &s) : aligned;
      s.output = ad::add(s.main_features, fused);
    }
    x = s.output;
    out.scales.push_back(std::move(s));
  }
  return out;
}

template <typename T>
Tensor<T> Inpainter<T>::decode(const std::vector<Tensor<T>>& features) const {
  RI_REQUIRE(features.size() == stages.size(), "decoder expects ", stages.size(),
             " feature maps, got ", features.size());
  const auto& deepest = features.back();
  const auto h = deepest.dim(2), w = deepest.dim(3);
  auto y = ad::from_tokens(decoder.block(ad::to_tokens(deepest), h, w), h, w);
  const auto& up = decoder.ups;
  const auto& rb = decoder.residual;
  y = up[1](up[0](y));
  y = rb[0](ad::concat<T>({y, features[1]}, 1));
  y = rb[1](ad::concat<T>({up[2](y), features[0]}, 1));
  y = rb[2](up[3](y));
  y = rb[3](up[4](y));
  return ad::tanh(decoder.head(y));
}

template <typename T>
InpaintOutput<T> Inpainter<T>::inpaint(const Tensor<T>& image, const Tensor<T>& mask,
                                       const Tensor<T>& reference_image) const {
  InpaintOutput<T> out;
  out.masked = apply_mask(image, mask);
  out.generated = decode(encode(out.masked, mask, reference_image).features());
  out.completed = ad::add(out.masked, ad::mul(out.generated, expand_mask(mask, image.dim(1))));
  return out;
}

template <typename T>
void Inpainter<T>::collect(ParameterList<T>& out, Variant v) const {
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const std::string p = "enc." + std::to_string(i) + ".";
    stages[i].embed.collect(out, p + "embed.");
    for (std::size_t d = 0; d < stages[i].main.size(); ++d) {
      stages[i].main[d].collect(out, p + "main." + std::to_string(d) + ".");
    }
  }
  if (uses_alignment(v)) {
    for (std::size_t i = 0; i < reference.size(); ++i) {
      const std::string p = "ref." + std::to_string(i) + ".";
      const auto& r = reference[i];
      r.embed.collect(out, p + "embed.");
      r.offsets.collect(out, p + "offsets.");
      r.deform.collect(out, p + "deform.");
      if (uses_harmonization(v)) r.harmonize.collect(out, p + "harmonize.");
      if (uses_refinement(v)) {
        r.mini_aligned.collect(out, p + "mini_aligned.");
        r.mini_reference.collect(out, p + "mini_reference.");
        r.attention.collect(out, p + "attn.");
        r.ffb.collect(out, p + "ffb.");
        r.upsample.collect(out, p + "up.");
      }
    }
  }
  decoder.block.collect(out, "dec.block.");
  for (std::size_t k = 0; k < decoder.ups.size(); ++k) {
    decoder.ups[k].collect(out, "dec.up" + std::to_string(k) + ".");
  }
  for (std::size_t k = 0; k < decoder.residual.size(); ++k) {
    decoder.residual[k].collect(out, "dec.res" + std::to_string(k) + ".");
  }
  decoder.head.collect(out, "dec.head.");
}

template <typename T>
ParameterList<T> Inpainter<T>::parameters() const {
  ParameterList<T> out;
  collect(out, config_.variant);
  return out;
}

template <typename T>
ParameterList<T> Inpainter<T>::all_parameters() const {
  ParameterList<T> out;
  collect(out, Variant::kFull);
  return out;
}

template Tensor<float> apply_mask(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> apply_mask(const Tensor<double>&, const Tensor<double>&);
template class Inpainter<float>;
template class Inpainter<double>;

}  // namespace refinpaint::model

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

#pragma once

#include <cstdint>
#include <vector>

#include "refinpaint/model/config.hpp"
#include "refinpaint/nn/alignment.hpp"
#include "refinpaint/nn/attention.hpp"
#include "refinpaint/nn/conv_blocks.hpp"

namespace refinpaint::model {

using ad::ParameterList;
using ad::Tensor;

// Intermediate features of one encoder stage. Members a variant does not
// compute stay undefined.
template <typename T>
struct EncoderScaleState {
  Tensor<T> input_patches;      // P_in   [N,C,h,w]
  Tensor<T> reference_patches;  // P_ref  [N,C,h,w]
  Tensor<T> offsets;            //        [N,2k^2,h,w]
  Tensor<T> coarse_aligned;     // P_CA   [N,C,h,w]
  Tensor<T> aligned;            // P_GA   [N,C,h,w]
  Tensor<T> mini_aligned;       // P_mGA  [N,C,h/2,w/2]
  Tensor<T> mini_reference;     // P_mref [N,C,h/2,w/2]
  Tensor<T> main_features;      // f_main [N,C,h,w]
  Tensor<T> reference_features; // f_ref, upsampled to [N,C,h,w]
  Tensor<T> output;             // stage output fed to the next stage
};

template <typename T>
struct EncoderOutput {
  std::vector<EncoderScaleState<T>> scales;
  std::vector<Tensor<T>> features() const {
    std::vector<Tensor<T>> f;
    for (const auto& s : scales) f.push_back(s.output);
    return f;
  }
};

template <typename T>
struct InpaintOutput {
  Tensor<T> masked;     // I_m = I * (1 - M)
  Tensor<T> generated;  // decoder output in [-1, 1]
  Tensor<T> completed;  // I_m + generated * M
};

// Per-stage modules of the input stream.
template <typename T>
struct EncoderStage {
  nn::PatchEmbed<T> embed;
  std::vector<nn::TransformerBlock<T>> main;
};

// Per-stage modules of the reference embedding.
template <typename T>
struct ReferenceStage {
  nn::PatchEmbed<T> embed;
  nn::OffsetEstimator<T> offsets;
  nn::DeformableConv<T> deform;
  nn::PatchHarmonization<T> harmonize;
  nn::PatchEmbed<T> mini_aligned;
  nn::PatchEmbed<T> mini_reference;
  nn::MultiHeadAttention<T> attention;
  nn::FeedForward<T> ffb;
  nn::UpsampleConv<T> upsample;
};

template <typename T>
struct Decoder {
  nn::TransformerBlock<T> block;
  std::vector<nn::UpsampleConv<T>> ups;       // 5 stages, x32 overall
  std::vector<nn::ResidualBlock<T>> residual;  // 4 blocks
  nn::Conv2d<T> head;
};

// Images are [N,3,H,W] in [-1,1]; masks [N,1,H,W] with 1 = missing. H and W
// must be multiples of config.size_multiple().
template <typename T>
class Inpainter {
 public:
  Inpainter(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  Variant variant() const { return config_.variant; }
  void set_variant(Variant v) { config_.variant = v; }

  // Globally aligned features of one stage (offsets, deformable sampling and,
  // depending on the variant, harmonization).
  Tensor<T> ref_pa(std::size_t stage, const Tensor<T>& input_patches,
                   const Tensor<T>& reference_patches, EncoderScaleState<T>* state = nullptr) const;
  // Half-resolution reference attention, upsampled back to the stage grid.
  Tensor<T> ref_pt(std::size_t stage, const Tensor<T>& aligned, const Tensor<T>& reference_patches,
                   EncoderScaleState<T>* state = nullptr) const;
  Tensor<T> main_pt(std::size_t stage, const Tensor<T>& input_patches) const;

  // masked_image [N,3,H,W], mask [N,1,H,W], reference [N,3,H,W].
  EncoderOutput<T> encode(const Tensor<T>& masked_image, const Tensor<T>& mask,
                          const Tensor<T>& reference) const;
  Tensor<T> decode(const std::vector<Tensor<T>>& features) const;
  InpaintOutput<T> inpaint(const Tensor<T>& image, const Tensor<T>& mask,
                           const Tensor<T>& reference) const;

  // Parameters used by the current variant, in a fixed order.
  ParameterList<T> parameters() const;
  // Every parameter the model owns, regardless of variant.
  ParameterList<T> all_parameters() const;

  std::vector<EncoderStage<T>> stages;
  std::vector<ReferenceStage<T>> reference;
  Decoder<T> decoder;

 private:
  void check_image_size(const Tensor<T>& x, const char* what) const;
  void collect(ParameterList<T>& out, Variant v) const;

  ModelConfig config_;
};

// I * (1 - M) with M broadcast over channels.
template <typename T>
Tensor<T> apply_mask(const Tensor<T>& image, const Tensor<T>& mask);

extern template class Inpainter<float>;
extern template class Inpainter<double>;

}  // namespace refinpaint::model

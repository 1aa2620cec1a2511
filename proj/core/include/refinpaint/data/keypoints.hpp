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

#include <array>
#include <vector>

#include "refinpaint/data/image.hpp"

namespace refinpaint::data {

inline constexpr std::size_t kDescriptorSize = 128;
using Descriptor = std::array<float, kDescriptorSize>;

struct Keypoint {
  float x = 0;            // sub-pixel position in image coordinates
  float y = 0;
  float scale = 0;        // blur sigma in image coordinates
  float orientation = 0;  // radians
  float response = 0;     // difference-of-Gaussians value
  Descriptor descriptor{};  // unit length
};

// Simplified scale-space detector: difference-of-Gaussians extrema over a few
// octaves, low-contrast and edge rejection, one dominant orientation, and a
// 4x4x8 gradient-orientation histogram descriptor. Not a SIFT clone.
struct DetectorOptions {
  std::size_t octaves = 3;
  std::size_t scales_per_octave = 3;
  double sigma = 1.6;
  double contrast_threshold = 0.04;  // on [0,1] intensities, divided by scales_per_octave
  double edge_ratio = 10.0;
  std::size_t border = 5;
  std::size_t max_keypoints = 1000;
};

// Deterministic; uniform images yield no keypoints.
std::vector<Keypoint> detect_and_describe(const Image& image, const DetectorOptions& options = {});

// Separable Gaussian blur of a single-channel float plane with clamped borders.
std::vector<float> gaussian_blur(const std::vector<float>& plane, std::size_t width,
                                 std::size_t height, double sigma);

}  // namespace refinpaint::data

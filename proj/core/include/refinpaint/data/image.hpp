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
#include <cstddef>
#include <cstdint>
#include <vector>

#include "refinpaint/tensor/tensor.hpp"

namespace refinpaint::data {

// 8-bit raster, row-major, channels interleaved.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(std::size_t width, std::size_t height, std::size_t channels, std::uint8_t fill = 0);

  std::uint8_t& at(std::size_t x, std::size_t y, std::size_t c = 0) {
    return pixels[(y * width + x) * channels + c];
  }
  std::uint8_t at(std::size_t x, std::size_t y, std::size_t c = 0) const {
    return pixels[(y * width + x) * channels + c];
  }
  bool empty() const { return pixels.empty(); }
  bool operator==(const Image&) const = default;
};

// Binary mask, 1 = missing.
struct Mask {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> values;

  Mask() = default;
  Mask(std::size_t width, std::size_t height, std::uint8_t fill = 0)
      : width(width), height(height), values(width * height, fill) {}

  std::uint8_t& at(std::size_t x, std::size_t y) { return values[y * width + x]; }
  std::uint8_t at(std::size_t x, std::size_t y) const { return values[y * width + x]; }
  std::size_t hole_count() const;
  double hole_ratio() const;
  bool operator==(const Mask&) const = default;
};

Image crop(const Image& image, std::size_t x0, std::size_t y0, std::size_t width, std::size_t height);

// Four W/2 x H/2 quadrants (top-left, top-right, bottom-left, bottom-right)
// followed by the centred W/2 x H/2 crop. Throws SizingError on odd sides.
std::array<Image, 5> subdivide(const Image& image);
// Top-left corner of each subdivide() piece in source coordinates.
std::array<std::array<std::size_t, 2>, 5> subdivision_origins(std::size_t width, std::size_t height);

// Box-filter downsampling by an integer factor (sides must divide).
Image downsample(const Image& image, std::size_t factor);
Mask downsample(const Mask& mask, std::size_t factor);  // any missing pixel -> missing

// Places images side by side (equal heights and channel counts).
Image hconcat(const std::vector<Image>& images);

// I * (1 - M): missing pixels become 0.
Image apply_mask(const Image& image, const Mask& mask);

// Luminance in [0, 1] (0.299 R + 0.587 G + 0.114 B for RGB input).
std::vector<float> to_gray(const Image& image);

// Values mapped p / 127.5 - 1 into [N=1, C, H, W].
template <typename T>
ad::Tensor<T> image_to_tensor(const Image& image);
// [1,1,H,W] with 0/1 entries.
template <typename T>
ad::Tensor<T> mask_to_tensor(const Mask& mask);
// Stacks single images along the batch axis.
template <typename T>
ad::Tensor<T> batch(const std::vector<ad::Tensor<T>>& items);
// Quantises element `index` of a [N,C,H,W] batch: round((v + 1) * 127.5),
// clamped to [0, 255].
template <typename T>
Image tensor_to_image(const ad::Tensor<T>& tensor, std::size_t index = 0);

Mask mask_from_image(const Image& image);  // nonzero -> 1
Image mask_to_image(const Mask& mask);      // 0 / 255, one channel

}  // namespace refinpaint::data

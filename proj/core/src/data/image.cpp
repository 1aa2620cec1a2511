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

#include "refinpaint/data/image.hpp"

#include <algorithm>
#include <cmath>

#include "refinpaint/errors.hpp"
#include "refinpaint/tensor/ops.hpp"

namespace refinpaint::data {

Image::Image(std::size_t w, std::size_t h, std::size_t c, std::uint8_t fill)
    : width(w), height(h), channels(c), pixels(w * h * c, fill) {}

std::size_t Mask::hole_count() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](auto v) { return v != 0; }));
}

double Mask::hole_ratio() const {
  return values.empty() ? 0.0 : static_cast<double>(hole_count()) / static_cast<double>(values.size());
}

Image crop(const Image& image, std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) {
  RI_REQUIRE(x0 + w <= image.width && y0 + h <= image.height, "crop ", w, "x", h, " at (", x0, ",",
             y0, ") exceeds ", image.width, "x", image.height, " image");
  Image out(w, h, image.channels);
  const auto row = w * image.channels;
  for (std::size_t y = 0; y < h; ++y) {
    const auto* src = &image.pixels[((y0 + y) * image.width + x0) * image.channels];
    std::copy(src, src + row, &out.pixels[y * row]);
  }
  return out;
}

std::array<std::array<std::size_t, 2>, 5> subdivision_origins(std::size_t width, std::size_t height) {
  if (width % 2 != 0 || height % 2 != 0 || width == 0 || height == 0) {
    throw SizingError(refinpaint::detail::concat_message(
        "subdivide needs even sides, got ", width % 2 ? "width " : "height ",
        width % 2 ? width : height));
  }
  const auto hw = width / 2, hh = height / 2;
  return {{{0, 0}, {hw, 0}, {0, hh}, {hw, hh}, {hw / 2, hh / 2}}};
}

std::array<Image, 5> subdivide(const Image& image) {
  const auto origins = subdivision_origins(image.width, image.height);
  std::array<Image, 5> out;
  for (std::size_t k = 0; k < 5; ++k) {
    out[k] = crop(image, origins[k][0], origins[k][1], image.width / 2, image.height / 2);
  }
  return out;
}

Image downsample(const Image& image, std::size_t factor) {
  RI_REQUIRE(factor >= 1, "downsample factor must be >= 1");
  if (image.width % factor || image.height % factor) {
    throw SizingError(refinpaint::detail::concat_message("cannot downsample ", image.width, "x",
                                                         image.height, " by ", factor));
  }
  if (factor == 1) return image;
  Image out(image.width / factor, image.height / factor, image.channels);
  const double area = static_cast<double>(factor * factor);
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) {
      for (std::size_t c = 0; c < image.channels; ++c) {
        double acc = 0;
        for (std::size_t dy = 0; dy < factor; ++dy) {
          for (std::size_t dx = 0; dx < factor; ++dx) acc += image.at(x * factor + dx, y * factor + dy, c);
        }
        out.at(x, y, c) = static_cast<std::uint8_t>(std::lround(acc / area));
      }
    }
  }
  return out;
}

Mask downsample(const Mask& mask, std::size_t factor) {
  RI_REQUIRE(factor >= 1, "downsample factor must be >= 1");
  if (mask.width % factor || mask.height % factor) {
    throw SizingError(refinpaint::detail::concat_message("cannot downsample ", mask.width, "x",
                                                         mask.height, " by ", factor));
  }
  Mask out(mask.width / factor, mask.height / factor);
  for (std::size_t y = 0; y < mask.height; ++y) {
    for (std::size_t x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) out.at(x / factor, y / factor) = 1;
    }
  }
  return out;
}

Image hconcat(const std::vector<Image>& images) {
  RI_REQUIRE(!images.empty(), "hconcat needs at least one image");
  std::size_t width = 0;
  for (const auto& im : images) {
    RI_REQUIRE(im.height == images[0].height && im.channels == images[0].channels,
               "hconcat: images differ in height or channels");
    width += im.width;
  }
  Image out(width, images[0].height, images[0].channels);
  std::size_t x0 = 0;
  for (const auto& im : images) {
    for (std::size_t y = 0; y < im.height; ++y) {
      std::copy_n(&im.pixels[y * im.width * im.channels], im.width * im.channels,
                  &out.pixels[(y * width + x0) * out.channels]);
    }
    x0 += im.width;
  }
  return out;
}

Image apply_mask(const Image& image, const Mask& mask) {
  RI_REQUIRE(mask.width == image.width && mask.height == image.height, "mask ", mask.width, "x",
             mask.height, " does not match image ", image.width, "x", image.height);
  Image out = image;
  for (std::size_t i = 0; i < mask.values.size(); ++i) {
    if (mask.values[i]) {
      for (std::size_t c = 0; c < image.channels; ++c) out.pixels[i * image.channels + c] = 0;
    }
  }
  return out;
}

std::vector<float> to_gray(const Image& image) {
  std::vector<float> out(image.width * image.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto* p = &image.pixels[i * image.channels];
    if (image.channels >= 3) {
      out[i] = (0.299f * p[0] + 0.587f * p[1] + 0.114f * p[2]) / 255.0f;
    } else {
      out[i] = p[0] / 255.0f;
    }
  }
  return out;
}

template <typename T>
ad::Tensor<T> image_to_tensor(const Image& image) {
  const auto plane = image.width * image.height;
  std::vector<T> v(plane * image.channels);
  for (std::size_t c = 0; c < image.channels; ++c) {
    for (std::size_t i = 0; i < plane; ++i) {
      v[c * plane + i] = static_cast<T>(image.pixels[i * image.channels + c]) / T(127.5) - T(1);
    }
  }
  return ad::Tensor<T>::from_data({1, image.channels, image.height, image.width}, std::move(v));
}

template <typename T>
ad::Tensor<T> mask_to_tensor(const Mask& mask) {
  std::vector<T> v(mask.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mask.values[i] ? T(1) : T(0);
  return ad::Tensor<T>::from_data({1, 1, mask.height, mask.width}, std::move(v));
}

template <typename T>
ad::Tensor<T> batch(const std::vector<ad::Tensor<T>>& items) {
  RI_REQUIRE(!items.empty(), "cannot batch zero tensors");
  return items.size() == 1 ? items.front() : ad::concat(items, 0);
}

template <typename T>
Image tensor_to_image(const ad::Tensor<T>& tensor, std::size_t index) {
  RI_REQUIRE(tensor.rank() == 4 && index < tensor.dim(0), "tensor_to_image expects [N,C,H,W] with N > ",
             index, ", got ", ad::to_string(tensor.shape()));
  const auto c = tensor.dim(1), h = tensor.dim(2), w = tensor.dim(3);
  Image out(w, h, c);
  const auto data = tensor.data();
  const auto plane = h * w;
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t i = 0; i < plane; ++i) {
      const double v = (static_cast<double>(data[(index * c + ch) * plane + i]) + 1.0) * 127.5;
      out.pixels[i * c + ch] = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
    }
  }
  return out;
}

Mask mask_from_image(const Image& image) {
  Mask m(image.width, image.height);
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    m.values[i] = image.pixels[i * image.channels] != 0 ? 1 : 0;
  }
  return m;
}

Image mask_to_image(const Mask& mask) {
  Image out(mask.width, mask.height, 1);
  for (std::size_t i = 0; i < mask.values.size(); ++i) out.pixels[i] = mask.values[i] ? 255 : 0;
  return out;
}

template ad::Tensor<float> image_to_tensor<float>(const Image&);
template ad::Tensor<double> image_to_tensor<double>(const Image&);
template ad::Tensor<float> mask_to_tensor<float>(const Mask&);
template ad::Tensor<double> mask_to_tensor<double>(const Mask&);
template ad::Tensor<float> batch(const std::vector<ad::Tensor<float>>&);
template ad::Tensor<double> batch(const std::vector<ad::Tensor<double>>&);
template Image tensor_to_image(const ad::Tensor<float>&, std::size_t);
template Image tensor_to_image(const ad::Tensor<double>&, std::size_t);

}  // namespace refinpaint::data

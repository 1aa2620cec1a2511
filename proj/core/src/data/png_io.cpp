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

#include "refinpaint/data/png_io.hpp"

#include <png.h>

#include <cstring>

#include "refinpaint/errors.hpp"

namespace refinpaint::data {

namespace {

Image read_png(const std::filesystem::path& path, png_uint_32 format, std::size_t channels) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw FormatError("cannot read PNG " + path.string() + ": " + img.message);
  }
  img.format = format;
  Image out(img.width, img.height, channels);
  if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    throw FormatError("cannot decode PNG " + path.string() + ": " + msg);
  }
  return out;
}

}  // namespace

Image read_png_rgb(const std::filesystem::path& path) { return read_png(path, PNG_FORMAT_RGB, 3); }

Image read_png_gray(const std::filesystem::path& path) { return read_png(path, PNG_FORMAT_GRAY, 1); }

void write_png(const std::filesystem::path& path, const Image& image) {
  png_uint_32 format = 0;
  switch (image.channels) {
    case 1: format = PNG_FORMAT_GRAY; break;
    case 3: format = PNG_FORMAT_RGB; break;
    case 4: format = PNG_FORMAT_RGBA; break;
    default: throw ContractViolation("write_png supports 1, 3 or 4 channels");
  }
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = format;
  if (!png_image_write_to_file(&img, path.c_str(), 0, image.pixels.data(), 0, nullptr)) {
    throw FormatError("cannot write PNG " + path.string() + ": " + img.message);
  }
}

Mask read_mask_png(const std::filesystem::path& path) { return mask_from_image(read_png_gray(path)); }

void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
  write_png(path, mask_to_image(mask));
}

}  // namespace refinpaint::data

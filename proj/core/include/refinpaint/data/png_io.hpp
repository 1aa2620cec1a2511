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

#include <filesystem>

#include "refinpaint/data/image.hpp"

namespace refinpaint::data {

// Decodes any PNG to 8-bit RGB (channels = 3) or grayscale (channels = 1).
// Throws FormatError on unreadable files.
Image read_png_rgb(const std::filesystem::path& path);
Image read_png_gray(const std::filesystem::path& path);
// Writes 1-, 3- or 4-channel images.
void write_png(const std::filesystem::path& path, const Image& image);

// 0 = known, 255 = missing; any nonzero value counts as missing.
Mask read_mask_png(const std::filesystem::path& path);
void write_mask_png(const std::filesystem::path& path, const Mask& mask);

}  // namespace refinpaint::data

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

#include "refinpaint/data/masks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "refinpaint/data/png_io.hpp"
#include "refinpaint/errors.hpp"

namespace refinpaint::data {

namespace {

const std::array<std::string, kRatioBins> kBinNames = {"0-10", "10-20", "20-30", "30-40", "40-50", "50-60"};

// Smallest hole count that lands in `bin` for `total` pixels: ceil(bin*total/10).
std::size_t bin_floor(std::size_t bin, std::size_t total) { return (bin * total + 9) / 10; }

class StrokeCanvas {
 public:
  StrokeCanvas(Mask& mask, std::size_t band, std::size_t target)
      : mask_(mask), band_(band), target_(target), count_(mask.hole_count()) {}

  bool full() const { return count_ >= target_; }
  std::size_t count() const { return count_; }

  // Stamps a disc, stopping as soon as the target count is reached.
  void stamp(double cx, double cy, double radius) {
    const auto w = static_cast<long>(mask_.width), h = static_cast<long>(mask_.height);
    const long lo = static_cast<long>(band_);
    const long x0 = std::max(lo, static_cast<long>(std::floor(cx - radius)));
    const long x1 = std::min(w - 1 - lo, static_cast<long>(std::ceil(cx + radius)));
    const long y0 = std::max(lo, static_cast<long>(std::floor(cy - radius)));
    const long y1 = std::min(h - 1 - lo, static_cast<long>(std::ceil(cy + radius)));
    const double r2 = radius * radius;
    for (long y = y0; y <= y1; ++y) {
      for (long x = x0; x <= x1; ++x) {
        if (full()) return;
        const double dx = x - cx, dy = y - cy;
        if (dx * dx + dy * dy > r2) continue;
        auto& v = mask_.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
        if (!v) {
          v = 1;
          ++count_;
        }
      }
    }
  }

 private:
  Mask& mask_;
  std::size_t band_;
  std::size_t target_;
  std::size_t count_;
};

}  // namespace

const std::string& bin_name(std::size_t bin) {
  RI_REQUIRE(bin < kRatioBins, "ratio bin ", bin, " out of range");
  return kBinNames[bin];
}

std::size_t parse_bin_name(const std::string& name) {
  for (std::size_t b = 0; b < kRatioBins; ++b) {
    if (kBinNames[b] == name) return b;
  }
  throw ContractViolation("unknown ratio bin '" + name + "'");
}

std::size_t classify_mask_ratio(const Mask& mask) {
  RI_REQUIRE(!mask.values.empty(), "cannot classify an empty mask");
  std::size_t holes = 0;
  for (auto v : mask.values) {
    RI_REQUIRE(v <= 1, "mask is not binary (found value ", static_cast<int>(v), ")");
    holes += v;
  }
  const std::size_t bin = holes * 10 / mask.values.size();
  if (bin >= kRatioBins) {
    throw ProtocolError(refinpaint::detail::concat_message(
        "hole ratio ", static_cast<double>(holes) / static_cast<double>(mask.values.size()),
        " is outside the 0-60% protocol"));
  }
  return bin;
}

bool touches_boundary(const Mask& mask) {
  if (mask.values.empty()) return false;
  for (std::size_t x = 0; x < mask.width; ++x) {
    if (mask.at(x, 0) || mask.at(x, mask.height - 1)) return true;
  }
  for (std::size_t y = 0; y < mask.height; ++y) {
    if (mask.at(0, y) || mask.at(mask.width - 1, y)) return true;
  }
  return false;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto z = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

MaskSpec draw_strokes(std::size_t bin, bool damaged_boundary, std::uint64_t seed,
                      const MaskOptions& options) {
  RI_REQUIRE(bin < kRatioBins, "ratio bin ", bin, " out of range");
  const auto w = options.width, h = options.height;
  RI_REQUIRE(w >= 16 && h >= 16, "masks must be at least 16x16");
  const std::size_t total = w * h;
  const std::size_t band = damaged_boundary ? 0 : options.border_band;
  RI_REQUIRE((w - 2 * band) * (h - 2 * band) * 10 >= (bin + 1) * total,
             "border band leaves too little room for bin ", bin_name(bin));

  std::mt19937_64 rng(seed);
  // Target hole count strictly inside the bin, away from the upper edge; the
  // lowest bin keeps at least 1%.
  const std::size_t lo = std::max(bin_floor(bin, total), std::max<std::size_t>(1, total / 100));
  const std::size_t hi = bin_floor(bin + 1, total) - 1;
  const std::size_t target = std::uniform_int_distribution<std::size_t>(lo, std::max(lo, hi))(rng);

  const double side = static_cast<double>(std::min(w, h));
  const double r_min = std::max(1.0, side / 64.0);
  const double r_max = std::max(r_min + 1.0, side / 16.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  MaskSpec spec;
  spec.bin = bin;
  spec.damaged_boundary = damaged_boundary;
  spec.mask = Mask(w, h);
  StrokeCanvas canvas(spec.mask, band, target);

  for (std::size_t stroke = 0; stroke < options.max_strokes && !canvas.full(); ++stroke) {
    double x, y;
    if (damaged_boundary && stroke == 0) {
      // Start on the border so at least one border pixel is missing.
      const auto side_idx = std::uniform_int_distribution<int>(0, 3)(rng);
      const double t = unit(rng);
      x = side_idx < 2 ? t * (w - 1) : (side_idx == 2 ? 0.0 : w - 1.0);
      y = side_idx >= 2 ? t * (h - 1) : (side_idx == 0 ? 0.0 : h - 1.0);
      x = std::round(x);
      y = std::round(y);
    } else {
      x = band + unit(rng) * (w - 1 - 2 * band);
      y = band + unit(rng) * (h - 1 - 2 * band);
    }
    double angle = unit(rng) * 2.0 * M_PI;
    const auto vertices = std::uniform_int_distribution<int>(4, 12)(rng);
    double radius = r_min + unit(rng) * (r_max - r_min);
    canvas.stamp(x, y, radius);
    for (int v = 0; v < vertices && !canvas.full(); ++v) {
      angle += (unit(rng) - 0.5) * M_PI;
      const double length = (0.25 + unit(rng)) * side / 8.0;
      radius = std::clamp(radius + (unit(rng) - 0.5) * r_min, r_min, r_max);
      const auto steps = static_cast<int>(std::ceil(length / std::max(1.0, radius / 2.0)));
      for (int s = 0; s < steps && !canvas.full(); ++s) {
        x = std::clamp(x + std::cos(angle) * length / steps, 0.0, w - 1.0);
        y = std::clamp(y + std::sin(angle) * length / steps, 0.0, h - 1.0);
        canvas.stamp(x, y, radius);
      }
    }
  }
  if (!canvas.full()) {
    throw std::runtime_error(refinpaint::detail::concat_message(
        "mask generation could not reach bin ", bin_name(bin), " after ", options.max_strokes,
        " strokes"));
  }
  return spec;
}

}  // namespace

MaskSpec gen_irregular_mask(std::size_t bin, bool damaged_boundary, std::uint64_t seed,
                            const MaskOptions& options) {
  // A truncated first stroke can miss the border; redraw with a derived seed.
  for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
    auto spec = draw_strokes(bin, damaged_boundary, attempt == 0 ? seed : mix_seed(seed, attempt, 7),
                             options);
    if (touches_boundary(spec.mask) == damaged_boundary) return spec;
  }
  throw std::runtime_error("mask generation could not satisfy the boundary requirement for bin " +
                           bin_name(bin));
}

std::vector<MaskSpec> generate_mask_corpus(std::size_t per_bin_count, std::uint64_t seed,
                                           const MaskOptions& options) {
  std::vector<MaskSpec> out;
  out.reserve(per_bin_count * kRatioBins);
  const std::size_t damaged = (per_bin_count + 1) / 2;
  for (std::size_t b = 0; b < kRatioBins; ++b) {
    for (std::size_t i = 0; i < per_bin_count; ++i) {
      out.push_back(gen_irregular_mask(b, i < damaged, mix_seed(seed, b, i), options));
    }
  }
  return out;
}

std::vector<std::filesystem::path> write_mask_corpus(const std::filesystem::path& out_dir,
                                                     const std::vector<MaskSpec>& corpus) {
  std::vector<std::filesystem::path> paths;
  std::array<std::size_t, kRatioBins> counters{};
  for (const auto& spec : corpus) {
    const auto dir = out_dir / bin_name(spec.bin);
    std::filesystem::create_directories(dir);
    char name[64];
    std::snprintf(name, sizeof name, "mask_%zu_%05zu_%c.png", spec.bin, counters[spec.bin]++,
                  spec.damaged_boundary ? 'b' : 'i');
    write_mask_png(dir / name, spec.mask);
    paths.push_back(dir / name);
  }
  return paths;
}

std::vector<CorpusEntry> list_mask_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw FormatError("not a directory: " + dir.string());
  std::vector<CorpusEntry> out;
  for (std::size_t b = 0; b < kRatioBins; ++b) {
    const auto sub = dir / bin_name(b);
    if (!std::filesystem::is_directory(sub)) continue;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(sub)) {
      if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (auto& f : files) out.push_back({std::move(f), b});
  }
  return out;
}

}  // namespace refinpaint::data

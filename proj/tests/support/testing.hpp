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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "refinpaint/data/image.hpp"
#include "refinpaint/tensor/ops.hpp"

namespace refinpaint::testing {

using ad::Shape;
using ad::Tensor;

template <typename T = double>
Tensor<T> random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0,
                        bool requires_grad = true) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<T> v(ad::element_count(shape));
  for (auto& x : v) x = static_cast<T>(dist(rng));
  return Tensor<T>::from_data(std::move(shape), std::move(v), requires_grad);
}

// Values bounded away from zero, for kinked ops.
inline Tensor<double> random_away_from_zero(Shape shape, std::mt19937_64& rng, double gap = 0.05) {
  std::uniform_real_distribution<double> mag(gap, 1.0);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> v(ad::element_count(shape));
  for (auto& x : v) x = sign(rng) ? mag(rng) : -mag(rng);
  return Tensor<double>::from_data(std::move(shape), std::move(v), true);
}

struct GradCheckResult {
  double max_error = 0;  // |analytic - numeric| / max(1, |analytic|, |numeric|)
  std::size_t checked = 0;
};

// Compares reverse-mode gradients of sum(f(inputs) * R), R a fixed random
// tensor, against central differences. At most `coords` randomly chosen
// entries of each input are probed (all of them when the input is small).
inline GradCheckResult grad_check(const std::vector<Tensor<double>>& inputs,
                                  const std::function<Tensor<double>()>& f, std::mt19937_64& rng,
                                  std::size_t coords = 12, double step = 1e-6) {
  for (auto t : inputs) t.zero_grad();
  auto out = f();
  auto weights = random_tensor<double>(out.shape(), rng, -1.0, 1.0, false);
  auto loss = ad::sum(ad::mul(out, weights));
  loss.backward();

  auto eval = [&] {
    ad::NoGradGuard guard;
    const auto o = f();
    double s = 0;
    const auto a = o.data();
    const auto w = weights.data();
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * w[i];
    return s;
  };

  GradCheckResult result;
  for (const auto& input : inputs) {
    auto t = input;
    const auto grad = t.grad();
    std::vector<std::size_t> idx(t.numel());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    if (idx.size() > coords) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(coords);
    }
    for (auto i : idx) {
      auto data = t.mutable_data();
      const double saved = data[i];
      data[i] = saved + step;
      const double up = eval();
      data[i] = saved - step;
      const double down = eval();
      data[i] = saved;
      const double numeric = (up - down) / (2 * step);
      const double analytic = grad[i];
      const double denom = std::max({1.0, std::abs(numeric), std::abs(analytic)});
      result.max_error = std::max(result.max_error, std::abs(numeric - analytic) / denom);
      ++result.checked;
    }
  }
  return result;
}

// Gradient-check tolerance and instance count shared by the unit and
// acceptance suites.
inline constexpr double kGradTolerance = 1e-5;
inline constexpr std::size_t kGradInstances = 20;

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <typename T>
double max_abs_diff(const Tensor<T>& a, const Tensor<T>& b) {
  double m = 0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(double(x[i]) - double(y[i])));
  return m;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("refinpaint_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Smooth, textured RGB scene sampled at an integer shift, so two calls with
// different shifts give overlapping views of one scene.
inline data::Image synthetic_scene(std::size_t width, std::size_t height, int shift_x = 0, int shift_y = 0,
                                   std::uint64_t seed = 0) {
  data::Image im;
  im.width = width;
  im.height = height;
  im.channels = 3;
  im.pixels.resize(width * height * 3);
  const double phase = static_cast<double>(seed % 97) * 0.37;
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double u = static_cast<double>(x) + shift_x;
      const double v = static_cast<double>(y) + shift_y;
      const double r = 127 + 100 * std::sin(u * 0.2 + phase) * std::cos(v * 0.15);
      const int check = ((static_cast<int>(std::floor(u / 8)) + static_cast<int>(std::floor(v / 8))) & 1);
      im.at(x, y, 0) = static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
      im.at(x, y, 1) = check ? 200 : 60;
      im.at(x, y, 2) = static_cast<std::uint8_t>(std::clamp(2.0 * (u + v), 0.0, 255.0));
    }
  }
  return im;
}

// Field of isolated bright blobs at pseudo-random positions over a dark
// background; gives the keypoint detector distinct, repeatable corners. The
// blob layout is a function of absolute scene coordinates, so shifted views
// agree on the overlap.
inline data::Image blob_scene(std::size_t width, std::size_t height, int shift_x = 0, int shift_y = 0,
                              std::uint64_t seed = 1) {
  data::Image im;
  im.width = width;
  im.height = height;
  im.channels = 3;
  im.pixels.resize(width * height * 3);
  // Slowly varying background so that identical blobs at different places
  // still get different descriptors.
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double u = static_cast<double>(x) + shift_x, v = static_cast<double>(y) + shift_y;
      const double g = 40 + 25 * std::sin(u * 0.045 + seed) * std::cos(v * 0.06 - seed);
      for (std::size_t c = 0; c < 3; ++c) im.at(x, y, c) = static_cast<std::uint8_t>(g + 10.0 * c);
    }
  }
  const int cell = 24;
  const int x0 = shift_x - cell, x1 = shift_x + static_cast<int>(width) + cell;
  const int y0 = shift_y - cell, y1 = shift_y + static_cast<int>(height) + cell;
  auto hash = [seed](int a, int b) {
    std::uint64_t h = seed * 0x9E3779B97F4A7C15ULL ^ (static_cast<std::uint64_t>(a + 100000) << 32) ^
                      static_cast<std::uint64_t>(b + 100000);
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return h;
  };
  auto floor_div = [](int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
  for (int cy = floor_div(y0, cell); cy <= floor_div(y1, cell); ++cy) {
    for (int cx = floor_div(x0, cell); cx <= floor_div(x1, cell); ++cx) {
      const auto h = hash(cx, cy);
      const int bx = cx * cell + 4 + static_cast<int>(h % 12);
      const int by = cy * cell + 4 + static_cast<int>((h >> 8) % 12);
      const int size = 3 + static_cast<int>((h >> 16) % 5);
      const std::uint8_t level = static_cast<std::uint8_t>(120 + (h >> 24) % 136);
      for (int y = by; y < by + size; ++y) {
        for (int x = bx; x < bx + size + static_cast<int>((h >> 32) % 4); ++x) {
          const int px = x - shift_x, py = y - shift_y;
          if (px < 0 || py < 0 || px >= static_cast<int>(width) || py >= static_cast<int>(height)) continue;
          for (std::size_t c = 0; c < 3; ++c) {
            im.at(px, py, c) = static_cast<std::uint8_t>(level - c * 30);
          }
        }
      }
    }
  }
  return im;
}

}  // namespace refinpaint::testing

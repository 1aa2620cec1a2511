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

#include <cstddef>
#include <span>
#include <vector>

#include "refinpaint/data/image.hpp"

namespace refinpaint::metrics {

// 10 log10(max^2 / MSE); +infinity when the inputs are identical.
double psnr(std::span<const double> x, std::span<const double> y, double max_value);
double psnr(const data::Image& x, const data::Image& y, double max_value = 255.0);
// PSNR restricted to pixels where mask == 1 (all channels).
double masked_psnr(const data::Image& x, const data::Image& y, const data::Mask& mask,
                   double max_value = 255.0);

struct SsimOptions {
  std::size_t window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double max_value = 255.0;
};

// Mean SSIM over all valid Gaussian-window positions of one plane. Planes
// smaller than the window are compared as a single uniformly weighted window.
double ssim_plane(std::span<const double> x, std::span<const double> y, std::size_t width,
                  std::size_t height, const SsimOptions& options = {});
// Luminance SSIM (0.299 R + 0.587 G + 0.114 B on the 0-255 scale).
double ssim(const data::Image& x, const data::Image& y, const SsimOptions& options = {});
std::vector<double> luminance(const data::Image& image);

struct GaussianStats {
  std::size_t dim = 0;
  std::vector<double> mean;
  std::vector<double> cov;  // dim x dim, row-major
};

// Sample mean and unbiased covariance (denominator max(n - 1, 1)).
GaussianStats gaussian_stats(const std::vector<std::vector<double>>& samples);

// |mu1 - mu2|^2 + Tr(S1 + S2 - 2 (S1 S2)^{1/2}). Tr (S1 S2)^{1/2} is taken
// from the eigenvalues of the symmetric product sqrt(S1) S2 sqrt(S1) and
// averaged over both argument orders, so the result is exactly symmetric.
// Eigenvalues down to -1e-8 (scaled by the largest) are clipped to 0; lower
// ones raise ContractViolation.
double frechet_distance(std::span<const double> mu1, std::span<const double> cov1,
                        std::span<const double> mu2, std::span<const double> cov2);
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

}  // namespace refinpaint::metrics

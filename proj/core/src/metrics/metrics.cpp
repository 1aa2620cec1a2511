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

#include "refinpaint/metrics/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "refinpaint/errors.hpp"

namespace refinpaint::metrics {

namespace {

double psnr_from_mse(double mse, double max_value) {
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_value * max_value / mse);
}

void require_same(const data::Image& x, const data::Image& y, const char* what) {
  RI_REQUIRE(x.width == y.width && x.height == y.height && x.channels == y.channels, what,
             ": images differ in shape (", x.width, "x", x.height, "x", x.channels, " vs ", y.width,
             "x", y.height, "x", y.channels, ")");
}

using Matrix = Eigen::MatrixXd;

Matrix as_matrix(std::span<const double> v, std::size_t d) {
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(i, j) = v[i * d + j];
  }
  return 0.5 * (m + m.transpose());
}

Eigen::VectorXd clipped_eigenvalues(const Eigen::SelfAdjointEigenSolver<Matrix>& solver, const char* what) {
  Eigen::VectorXd ev = solver.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-8 * scale) {
      throw ContractViolation(refinpaint::detail::concat_message(
          what, " is not positive semidefinite (eigenvalue ", ev(i), ")"));
    }
    ev(i) = std::max(0.0, ev(i));
  }
  return ev;
}

// Tr (A B)^{1/2} for PSD A, B.
double trace_sqrt_product(const Matrix& a, const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> sa(a);
  const auto ea = clipped_eigenvalues(sa, "covariance");
  const Matrix root = sa.eigenvectors() * ea.cwiseSqrt().asDiagonal() * sa.eigenvectors().transpose();
  Matrix inner = root * b * root;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> si(inner, Eigen::EigenvaluesOnly);
  return clipped_eigenvalues(si, "covariance product").cwiseSqrt().sum();
}

}  // namespace

double psnr(std::span<const double> x, std::span<const double> y, double max_value) {
  RI_REQUIRE(x.size() == y.size() && !x.empty(), "psnr: inputs must be nonempty and equal in size");
  double acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
  return psnr_from_mse(acc / static_cast<double>(x.size()), max_value);
}

double psnr(const data::Image& x, const data::Image& y, double max_value) {
  require_same(x, y, "psnr");
  RI_REQUIRE(!x.pixels.empty(), "psnr: empty images");
  double acc = 0;
  for (std::size_t i = 0; i < x.pixels.size(); ++i) {
    const double d = static_cast<double>(x.pixels[i]) - y.pixels[i];
    acc += d * d;
  }
  return psnr_from_mse(acc / static_cast<double>(x.pixels.size()), max_value);
}

double masked_psnr(const data::Image& x, const data::Image& y, const data::Mask& mask, double max_value) {
  require_same(x, y, "masked_psnr");
  RI_REQUIRE(mask.width == x.width && mask.height == x.height, "masked_psnr: mask size mismatch");
  double acc = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < mask.values.size(); ++i) {
    if (!mask.values[i]) continue;
    for (std::size_t c = 0; c < x.channels; ++c) {
      const double d = static_cast<double>(x.pixels[i * x.channels + c]) - y.pixels[i * x.channels + c];
      acc += d * d;
      ++n;
    }
  }
  RI_REQUIRE(n > 0, "masked_psnr: mask selects no pixels");
  return psnr_from_mse(acc / static_cast<double>(n), max_value);
}

std::vector<double> luminance(const data::Image& image) {
  std::vector<double> out(image.width * image.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto* p = &image.pixels[i * image.channels];
    out[i] = image.channels >= 3 ? 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2] : static_cast<double>(p[0]);
  }
  return out;
}

double ssim_plane(std::span<const double> x, std::span<const double> y, std::size_t width,
                  std::size_t height, const SsimOptions& opt) {
  RI_REQUIRE(x.size() == width * height && y.size() == x.size() && !x.empty(),
             "ssim: planes must match width*height");
  const double c1 = (opt.k1 * opt.max_value) * (opt.k1 * opt.max_value);
  const double c2 = (opt.k2 * opt.max_value) * (opt.k2 * opt.max_value);
  auto ssim_of = [&](double mx, double my, double sxx, double syy, double sxy) {
    return ((2 * (mx * my) + c1) * (2 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2));
  };

  const std::size_t win = opt.window;
  if (width < win || height < win) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += x[i] * x[i];
      syy += y[i] * y[i];
      sxy += x[i] * y[i];
    }
    return ssim_of(mx, my, sxx / n - mx * mx, syy / n - my * my, sxy / n - mx * my);
  }

  std::vector<double> g(win);
  double total = 0;
  const double half = (static_cast<double>(win) - 1.0) / 2.0;
  for (std::size_t k = 0; k < win; ++k) {
    const double d = static_cast<double>(k) - half;
    total += g[k] = std::exp(-d * d / (2 * opt.sigma * opt.sigma));
  }
  for (auto& v : g) v /= total;

  const std::size_t ow = width - win + 1, oh = height - win + 1;
  double acc = 0;
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      double mx = 0, my = 0, exx = 0, eyy = 0, exy = 0;
      for (std::size_t i = 0; i < win; ++i) {
        for (std::size_t j = 0; j < win; ++j) {
          const double w = g[i] * g[j];
          const double a = x[(oy + i) * width + ox + j], b = y[(oy + i) * width + ox + j];
          mx += w * a;
          my += w * b;
          exx += w * a * a;
          eyy += w * b * b;
          exy += w * (a * b);
        }
      }
      acc += ssim_of(mx, my, exx - mx * mx, eyy - my * my, exy - (mx * my));
    }
  }
  return acc / static_cast<double>(ow * oh);
}

double ssim(const data::Image& x, const data::Image& y, const SsimOptions& options) {
  require_same(x, y, "ssim");
  return ssim_plane(luminance(x), luminance(y), x.width, x.height, options);
}

GaussianStats gaussian_stats(const std::vector<std::vector<double>>& samples) {
  RI_REQUIRE(!samples.empty(), "gaussian_stats needs at least one sample");
  GaussianStats s;
  s.dim = samples.front().size();
  s.mean.assign(s.dim, 0.0);
  for (const auto& v : samples) {
    RI_REQUIRE(v.size() == s.dim, "gaussian_stats: samples differ in dimension");
    for (std::size_t i = 0; i < s.dim; ++i) s.mean[i] += v[i];
  }
  const double n = static_cast<double>(samples.size());
  for (auto& m : s.mean) m /= n;
  s.cov.assign(s.dim * s.dim, 0.0);
  for (const auto& v : samples) {
    for (std::size_t i = 0; i < s.dim; ++i) {
      for (std::size_t j = 0; j < s.dim; ++j) {
        s.cov[i * s.dim + j] += (v[i] - s.mean[i]) * (v[j] - s.mean[j]);
      }
    }
  }
  const double denom = std::max(1.0, n - 1.0);
  for (auto& c : s.cov) c /= denom;
  return s;
}

double frechet_distance(std::span<const double> mu1, std::span<const double> cov1,
                        std::span<const double> mu2, std::span<const double> cov2) {
  const auto d = mu1.size();
  RI_REQUIRE(d > 0 && mu2.size() == d && cov1.size() == d * d && cov2.size() == d * d,
             "frechet_distance: inconsistent dimensions");
  if (std::equal(mu1.begin(), mu1.end(), mu2.begin()) && std::equal(cov1.begin(), cov1.end(), cov2.begin())) {
    // Still validate the input.
    trace_sqrt_product(as_matrix(cov1, d), as_matrix(cov1, d));
    return 0.0;
  }
  double mean_term = 0;
  for (std::size_t i = 0; i < d; ++i) mean_term += (mu1[i] - mu2[i]) * (mu1[i] - mu2[i]);
  const Matrix a = as_matrix(cov1, d), b = as_matrix(cov2, d);
  const double cross = 0.5 * (trace_sqrt_product(a, b) + trace_sqrt_product(b, a));
  const double value = mean_term + (a.trace() + b.trace()) - 2.0 * cross;
  return std::max(0.0, value);
}

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
  return frechet_distance(a.mean, a.cov, b.mean, b.cov);
}

}  // namespace refinpaint::metrics

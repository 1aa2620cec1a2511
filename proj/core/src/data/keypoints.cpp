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

#include "refinpaint/data/keypoints.hpp"

#include <algorithm>
#include <cmath>

#include "refinpaint/errors.hpp"

namespace refinpaint::data {

namespace {

constexpr double kInitialBlur = 0.5;
constexpr int kOrientationBins = 36;
constexpr int kGrid = 4;
constexpr int kAngleBins = 8;

struct Plane {
  std::size_t width = 0, height = 0;
  std::vector<float> v;

  float at(long x, long y) const {
    x = std::clamp<long>(x, 0, static_cast<long>(width) - 1);
    y = std::clamp<long>(y, 0, static_cast<long>(height) - 1);
    return v[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)];
  }
};

Plane blurred(const Plane& p, double sigma) {
  return {p.width, p.height, gaussian_blur(p.v, p.width, p.height, sigma)};
}

Plane halve(const Plane& p) {
  Plane out{std::max<std::size_t>(1, p.width / 2), std::max<std::size_t>(1, p.height / 2), {}};
  out.v.resize(out.width * out.height);
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) out.v[y * out.width + x] = p.at(2 * x, 2 * y);
  }
  return out;
}

void gradient(const Plane& p, long x, long y, float& mag, float& angle) {
  const float gx = p.at(x + 1, y) - p.at(x - 1, y);
  const float gy = p.at(x, y + 1) - p.at(x, y - 1);
  mag = std::sqrt(gx * gx + gy * gy);
  angle = std::atan2(gy, gx);
}

float dominant_orientation(const Plane& g, long x, long y, double sigma) {
  const double s = 1.5 * sigma;
  const long radius = std::lround(3.0 * s);
  std::array<double, kOrientationBins> hist{};
  for (long dy = -radius; dy <= radius; ++dy) {
    for (long dx = -radius; dx <= radius; ++dx) {
      const long px = x + dx, py = y + dy;
      if (px <= 0 || py <= 0 || px >= static_cast<long>(g.width) - 1 ||
          py >= static_cast<long>(g.height) - 1) {
        continue;
      }
      float mag, ang;
      gradient(g, px, py, mag, ang);
      const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * s * s));
      int bin = static_cast<int>(std::lround(kOrientationBins * (ang + M_PI) / (2.0 * M_PI)));
      hist[static_cast<std::size_t>(bin % kOrientationBins)] += w * mag;
    }
  }
  std::array<double, kOrientationBins> smooth{};
  for (int i = 0; i < kOrientationBins; ++i) {
    const auto at = [&](int k) { return hist[static_cast<std::size_t>((k + kOrientationBins) % kOrientationBins)]; };
    smooth[static_cast<std::size_t>(i)] = 0.25 * at(i - 1) + 0.5 * at(i) + 0.25 * at(i + 1);
  }
  const auto best = static_cast<int>(std::max_element(smooth.begin(), smooth.end()) - smooth.begin());
  const double l = smooth[static_cast<std::size_t>((best + kOrientationBins - 1) % kOrientationBins)];
  const double c = smooth[static_cast<std::size_t>(best)];
  const double r = smooth[static_cast<std::size_t>((best + 1) % kOrientationBins)];
  const double denom = l - 2 * c + r;
  const double shift = denom != 0.0 ? 0.5 * (l - r) / denom : 0.0;
  return static_cast<float>((best + shift) * 2.0 * M_PI / kOrientationBins - M_PI);
}

bool describe(const Plane& g, double x, double y, double sigma, float orientation, Descriptor& out) {
  const double hist_width = 3.0 * sigma;
  const long radius = std::lround(hist_width * std::sqrt(2.0) * (kGrid + 1) * 0.5);
  const double cos_o = std::cos(orientation), sin_o = std::sin(orientation);
  std::array<double, kGrid * kGrid * kAngleBins> hist{};
  const long cx = std::lround(x), cy = std::lround(y);
  for (long i = -radius; i <= radius; ++i) {
    for (long j = -radius; j <= radius; ++j) {
      const double r_rot = (j * -sin_o + i * cos_o) / hist_width;
      const double c_rot = (j * cos_o + i * sin_o) / hist_width;
      const double rbin = r_rot + kGrid / 2.0 - 0.5;
      const double cbin = c_rot + kGrid / 2.0 - 0.5;
      if (rbin <= -1 || rbin >= kGrid || cbin <= -1 || cbin >= kGrid) continue;
      const long px = cx + j, py = cy + i;
      if (px <= 0 || py <= 0 || px >= static_cast<long>(g.width) - 1 ||
          py >= static_cast<long>(g.height) - 1) {
        continue;
      }
      float mag, ang;
      gradient(g, px, py, mag, ang);
      const double w = std::exp(-(r_rot * r_rot + c_rot * c_rot) / (2.0 * 0.25 * kGrid * kGrid));
      double obin = (ang - orientation) * kAngleBins / (2.0 * M_PI);
      obin = std::fmod(obin + 2.0 * kAngleBins, static_cast<double>(kAngleBins));
      const double value = w * mag;
      const int r0 = static_cast<int>(std::floor(rbin));
      const int c0 = static_cast<int>(std::floor(cbin));
      const int o0 = static_cast<int>(std::floor(obin));
      const double dr = rbin - r0, dc = cbin - c0, dob = obin - o0;
      for (int a = 0; a < 2; ++a) {
        const int rr = r0 + a;
        if (rr < 0 || rr >= kGrid) continue;
        const double wr = a ? dr : 1 - dr;
        for (int b = 0; b < 2; ++b) {
          const int cc = c0 + b;
          if (cc < 0 || cc >= kGrid) continue;
          const double wc = b ? dc : 1 - dc;
          for (int k = 0; k < 2; ++k) {
            const int oo = (o0 + k) % kAngleBins;
            const double wo = k ? dob : 1 - dob;
            hist[static_cast<std::size_t>((rr * kGrid + cc) * kAngleBins + oo)] += value * wr * wc * wo;
          }
        }
      }
    }
  }
  auto normalise = [&]() {
    double n = 0;
    for (double v : hist) n += v * v;
    n = std::sqrt(n);
    if (n <= 1e-12) return false;
    for (double& v : hist) v /= n;
    return true;
  };
  if (!normalise()) return false;
  for (double& v : hist) v = std::min(v, 0.2);
  if (!normalise()) return false;
  for (std::size_t k = 0; k < hist.size(); ++k) out[k] = static_cast<float>(hist[k]);
  return true;
}

}  // namespace

std::vector<float> gaussian_blur(const std::vector<float>& plane, std::size_t width,
                                 std::size_t height, double sigma) {
  RI_REQUIRE(plane.size() == width * height, "gaussian_blur: plane size mismatch");
  if (sigma <= 0) return plane;
  const long radius = std::max<long>(1, static_cast<long>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double total = 0;
  for (long k = -radius; k <= radius; ++k) {
    total += kernel[static_cast<std::size_t>(k + radius)] = std::exp(-(k * k) / (2.0 * sigma * sigma));
  }
  for (auto& k : kernel) k /= total;
  const long w = static_cast<long>(width), h = static_cast<long>(height);
  std::vector<float> tmp(plane.size()), out(plane.size());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double acc = 0;
      for (long k = -radius; k <= radius; ++k) {
        const long xx = std::clamp(x + k, 0L, w - 1);
        acc += kernel[static_cast<std::size_t>(k + radius)] * plane[static_cast<std::size_t>(y * w + xx)];
      }
      tmp[static_cast<std::size_t>(y * w + x)] = static_cast<float>(acc);
    }
  }
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double acc = 0;
      for (long k = -radius; k <= radius; ++k) {
        const long yy = std::clamp(y + k, 0L, h - 1);
        acc += kernel[static_cast<std::size_t>(k + radius)] * tmp[static_cast<std::size_t>(yy * w + x)];
      }
      out[static_cast<std::size_t>(y * w + x)] = static_cast<float>(acc);
    }
  }
  return out;
}

std::vector<Keypoint> detect_and_describe(const Image& image, const DetectorOptions& opt) {
  RI_REQUIRE(opt.scales_per_octave >= 1 && opt.octaves >= 1, "detector needs >= 1 octave and scale");
  std::vector<Keypoint> found;
  if (image.empty()) return found;

  const auto s = static_cast<int>(opt.scales_per_octave);
  Plane base{image.width, image.height, to_gray(image)};
  base = blurred(base, std::sqrt(std::max(0.0, opt.sigma * opt.sigma - kInitialBlur * kInitialBlur)));
  const double threshold = opt.contrast_threshold / s;
  const double edge = (opt.edge_ratio + 1) * (opt.edge_ratio + 1) / opt.edge_ratio;

  for (std::size_t o = 0; o < opt.octaves; ++o) {
    if (base.width < 2 * opt.border + 3 || base.height < 2 * opt.border + 3) break;
    std::vector<Plane> gauss{base};
    std::vector<double> sigmas{opt.sigma};
    for (int k = 1; k < s + 3; ++k) {
      const double sig = opt.sigma * std::pow(2.0, static_cast<double>(k) / s);
      gauss.push_back(blurred(gauss.back(), std::sqrt(sig * sig - sigmas.back() * sigmas.back())));
      sigmas.push_back(sig);
    }
    std::vector<Plane> dog;
    for (std::size_t k = 0; k + 1 < gauss.size(); ++k) {
      Plane d{base.width, base.height, std::vector<float>(base.v.size())};
      for (std::size_t i = 0; i < d.v.size(); ++i) d.v[i] = gauss[k + 1].v[i] - gauss[k].v[i];
      dog.push_back(std::move(d));
    }
    const double octave_scale = std::pow(2.0, static_cast<double>(o));
    const long b = static_cast<long>(opt.border);
    for (int k = 1; k <= s; ++k) {
      const auto& d = dog[static_cast<std::size_t>(k)];
      for (long y = b; y < static_cast<long>(d.height) - b; ++y) {
        for (long x = b; x < static_cast<long>(d.width) - b; ++x) {
          const float v = d.at(x, y);
          if (std::abs(v) <= threshold) continue;
          bool is_max = true, is_min = true;
          for (int dk = -1; dk <= 1 && (is_max || is_min); ++dk) {
            const auto& n = dog[static_cast<std::size_t>(k + dk)];
            for (long dy = -1; dy <= 1; ++dy) {
              for (long dx = -1; dx <= 1; ++dx) {
                if (dk == 0 && dy == 0 && dx == 0) continue;
                const float u = n.at(x + dx, y + dy);
                if (u >= v) is_max = false;
                if (u <= v) is_min = false;
              }
            }
          }
          if (!is_max && !is_min) continue;
          const double dxx = d.at(x + 1, y) + d.at(x - 1, y) - 2.0 * v;
          const double dyy = d.at(x, y + 1) + d.at(x, y - 1) - 2.0 * v;
          const double dxy = 0.25 * (d.at(x + 1, y + 1) - d.at(x - 1, y + 1) - d.at(x + 1, y - 1) +
                                     d.at(x - 1, y - 1));
          const double tr = dxx + dyy, det = dxx * dyy - dxy * dxy;
          if (det <= 0 || tr * tr / det >= edge) continue;
          // Per-axis parabolic refinement.
          const double ox = dxx != 0 ? std::clamp(-0.5 * (d.at(x + 1, y) - d.at(x - 1, y)) / dxx, -0.5, 0.5) : 0.0;
          const double oy = dyy != 0 ? std::clamp(-0.5 * (d.at(x, y + 1) - d.at(x, y - 1)) / dyy, -0.5, 0.5) : 0.0;
          const auto& g = gauss[static_cast<std::size_t>(k)];
          Keypoint kp;
          kp.orientation = dominant_orientation(g, x, y, sigmas[static_cast<std::size_t>(k)]);
          if (!describe(g, x + ox, y + oy, sigmas[static_cast<std::size_t>(k)], kp.orientation,
                        kp.descriptor)) {
            continue;
          }
          kp.x = static_cast<float>((x + ox) * octave_scale);
          kp.y = static_cast<float>((y + oy) * octave_scale);
          kp.scale = static_cast<float>(sigmas[static_cast<std::size_t>(k)] * octave_scale);
          kp.response = v;
          found.push_back(kp);
        }
      }
    }
    base = halve(gauss[static_cast<std::size_t>(s)]);
  }
  if (found.size() > opt.max_keypoints) {
    std::stable_sort(found.begin(), found.end(), [](const Keypoint& a, const Keypoint& b) {
      return std::abs(a.response) > std::abs(b.response);
    });
    found.resize(opt.max_keypoints);
  }
  return found;
}

}  // namespace refinpaint::data

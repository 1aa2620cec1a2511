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

#include "refinpaint/data/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "refinpaint/errors.hpp"

namespace refinpaint::data {

namespace {

double distance(const Descriptor& a, const Descriptor& b) {
  double acc = 0;
  for (std::size_t k = 0; k < kDescriptorSize; ++k) {
    const double d = static_cast<double>(a[k]) - b[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

struct Nearest {
  std::size_t index = 0;
  double first = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
};

Nearest two_nearest(const Descriptor& q, const std::vector<Descriptor>& set) {
  Nearest n;
  for (std::size_t j = 0; j < set.size(); ++j) {
    const double d = distance(q, set[j]);
    if (d < n.first) {
      n.second = n.first;
      n.first = d;
      n.index = j;
    } else if (d < n.second) {
      n.second = d;
    }
  }
  return n;
}

}  // namespace

bool passes_ratio_test(double nearest, double second, double ratio) { return nearest < ratio * second; }

std::vector<Match> match_knn(const std::vector<Descriptor>& a, const std::vector<Descriptor>& b,
                             const MatchOptions& options) {
  std::vector<Match> out;
  if (a.empty() || b.empty()) return out;
  const bool absolute = options.absolute || b.size() < 2;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto n = two_nearest(a[i], b);
    const bool keep = absolute ? n.first <= options.max_distance
                               : passes_ratio_test(n.first, n.second, options.ratio);
    if (!keep) continue;
    if (options.cross_check && two_nearest(b[n.index], a).index != i) continue;
    out.push_back({i, n.index, static_cast<float>(n.first)});
  }
  return out;
}

std::vector<Descriptor> descriptors_of(const std::vector<Keypoint>& keypoints) {
  std::vector<Descriptor> out;
  out.reserve(keypoints.size());
  for (const auto& k : keypoints) out.push_back(k.descriptor);
  return out;
}

const char* reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::kAccepted: return "accepted";
    case RejectReason::kTooFewMatches: return "too_few_matches";
    case RejectReason::kImageTooSmall: return "image_too_small";
  }
  return "?";
}

std::size_t clamp_center(double center, std::size_t size, std::size_t extent) {
  RI_REQUIRE(size <= extent, "window ", size, " exceeds extent ", extent);
  const double lo = static_cast<double>(size / 2);
  const double hi = static_cast<double>(extent - size + size / 2);
  return static_cast<std::size_t>(std::lround(std::clamp(center, lo, hi)));
}

std::vector<Match> consistent_matches(const std::vector<Keypoint>& keypoints_a,
                                      const std::vector<Keypoint>& keypoints_b,
                                      const std::vector<Match>& matches, double radius) {
  for (const auto& m : matches) {
    RI_REQUIRE(m.query < keypoints_a.size() && m.train < keypoints_b.size(),
               "match refers to a missing keypoint");
  }
  if (radius <= 0 || matches.empty()) return matches;
  std::vector<double> dx, dy;
  for (const auto& m : matches) {
    dx.push_back(keypoints_a[m.query].x - keypoints_b[m.train].x);
    dy.push_back(keypoints_a[m.query].y - keypoints_b[m.train].y);
  }
  auto median = [](std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2) return *mid;
    return 0.5 * (*mid + *std::max_element(v.begin(), mid));
  };
  const double mx = median(dx), my = median(dy);
  std::vector<Match> out;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    if (std::hypot(dx[i] - mx, dy[i] - my) <= radius) out.push_back(matches[i]);
  }
  return out;
}

CropPair crop_pair(const Image& a, const Image& b, const std::vector<Keypoint>& keypoints_a,
                   const std::vector<Keypoint>& keypoints_b, const std::vector<Match>& all_matches,
                   const CropOptions& options) {
  CropPair out;
  out.raw_matches = all_matches.size();
  const auto size = options.crop_size;
  if (a.width < size || a.height < size || b.width < size || b.height < size) {
    out.reason = RejectReason::kImageTooSmall;
    return out;
  }
  const auto matches = consistent_matches(keypoints_a, keypoints_b, all_matches, options.consistency_radius);
  out.matches = matches.size();
  if (matches.empty() || matches.size() < options.min_matches) {
    out.reason = RejectReason::kTooFewMatches;
    return out;
  }
  double ax = 0, ay = 0, bx = 0, by = 0;
  for (const auto& m : matches) {
    ax += keypoints_a[m.query].x;
    ay += keypoints_a[m.query].y;
    bx += keypoints_b[m.train].x;
    by += keypoints_b[m.train].y;
  }
  const double n = static_cast<double>(matches.size());
  out.cx_a = clamp_center(ax / n, size, a.width);
  out.cy_a = clamp_center(ay / n, size, a.height);
  out.cx_b = clamp_center(bx / n, size, b.width);
  out.cy_b = clamp_center(by / n, size, b.height);
  out.crop_a = crop(a, out.cx_a - size / 2, out.cy_a - size / 2, size, size);
  out.crop_b = crop(b, out.cx_b - size / 2, out.cy_b - size / 2, size, size);
  return out;
}

}  // namespace refinpaint::data

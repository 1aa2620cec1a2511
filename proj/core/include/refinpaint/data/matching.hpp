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

#include <string>
#include <vector>

#include "refinpaint/data/keypoints.hpp"

namespace refinpaint::data {

struct Match {
  std::size_t query = 0;  // index into the first set
  std::size_t train = 0;  // index into the second set
  float distance = 0;     // Euclidean
};

struct MatchOptions {
  // Keep a match when nearest < ratio * second nearest.
  double ratio = 0.7;
  // Also require the pair to be mutual nearest neighbours.
  bool cross_check = false;
  // Use a plain distance threshold instead of the ratio test. This is also
  // the fallback when the second set has fewer than two descriptors.
  bool absolute = false;
  double max_distance = 0.4;
};

bool passes_ratio_test(double nearest, double second, double ratio);

std::vector<Match> match_knn(const std::vector<Descriptor>& a, const std::vector<Descriptor>& b,
                             const MatchOptions& options = {});
std::vector<Descriptor> descriptors_of(const std::vector<Keypoint>& keypoints);

enum class RejectReason { kAccepted, kTooFewMatches, kImageTooSmall };
const char* reject_reason_name(RejectReason r);

struct CropOptions {
  std::size_t crop_size = 256;
  std::size_t min_matches = 8;
  // A match is eligible when its displacement lies within this many pixels
  // of the median displacement. Zero or less keeps every match.
  double consistency_radius = 32.0;
};

struct CropPair {
  RejectReason reason = RejectReason::kAccepted;
  std::size_t matches = 0;      // eligible matches
  std::size_t raw_matches = 0;  // matches before the consistency filter
  // Window centres in the coordinates of the images passed in.
  std::size_t cx_a = 0, cy_a = 0, cx_b = 0, cy_b = 0;
  Image crop_a, crop_b;

  bool accepted() const { return reason == RejectReason::kAccepted; }
};

// Centres a crop_size window on the centroid of the eligible matched
// keypoints in each image, clamped so the window stays inside the image.
CropPair crop_pair(const Image& a, const Image& b, const std::vector<Keypoint>& keypoints_a,
                   const std::vector<Keypoint>& keypoints_b, const std::vector<Match>& matches,
                   const CropOptions& options = {});

// Matches whose displacement (a - b) is within `radius` of the median
// displacement, in input order.
std::vector<Match> consistent_matches(const std::vector<Keypoint>& keypoints_a,
                                      const std::vector<Keypoint>& keypoints_b,
                                      const std::vector<Match>& matches, double radius);

// Clamps a window centre so [c - size/2, c - size/2 + size) fits in [0, extent).
std::size_t clamp_center(double center, std::size_t size, std::size_t extent);

}  // namespace refinpaint::data

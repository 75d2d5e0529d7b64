// Copyright 2026 The Locus Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "locus/types.hpp"

namespace locus {

struct SegmentationConfig {
  double cluster_distance = 0.2;
  std::size_t min_points = 100;
  std::size_t max_points = 15000;
  double max_range = 60.0;

  // Ground removal.
  int ransac_iterations = 200;
  double ransac_threshold = 0.3;
  double normal_cone_deg = 30.0;
  double min_ground_fraction = 0.15;
  double fallback_percentile = 0.05;
  std::uint64_t ransac_seed = 0x5eed;
};

void validate(const SegmentationConfig& config);

/// Plane n·p + offset = 0 with unit normal pointing up (n.z > 0).
struct GroundPlane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
  bool from_fallback = false;

  double height_of(const Vec3& p) const { return normal.dot(p) + offset; }
};

struct GroundRemoval {
  PointCloudFrame cloud;                  // non-ground points
  std::vector<std::size_t> kept_indices;  // into the input frame
  GroundPlane plane;
};

/// RANSAC ground plane restricted to near-horizontal candidates; all inliers
/// of the best plane are dropped. Falls back to a z-percentile slab when no
/// candidate reaches `min_ground_fraction` of the points.
GroundRemoval remove_ground(const PointCloudFrame& frame, const SegmentationConfig& config);

struct Segment {
  std::vector<Vec3> points;
  Vec3 centroid = Vec3::Zero();
  std::size_t id = 0;
  std::vector<std::size_t> source_indices;  // into the frame that was clustered
};

struct SegmentSet {
  std::vector<Segment> segments;
  std::size_t source_frame_index = 0;
  GroundPlane ground;

  std::size_t size() const { return segments.size(); }
};

Vec3 centroid_of(const std::vector<Vec3>& points);

/// Connected components of the graph joining points closer than
/// `cluster_distance`, size-filtered to [min_points, max_points]. Ids follow
/// discovery order (the smallest input index of each component).
SegmentSet extract_segments(const PointCloudFrame& frame, const SegmentationConfig& config);

/// Full per-frame segmentation: ground removal, range cut, clustering.
/// `source_indices` of the result refer to the original frame.
SegmentSet segment_frame(const PointCloudFrame& frame, const SegmentationConfig& config);

}  // namespace locus

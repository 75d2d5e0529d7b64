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
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace locus {

using Vec3 = Eigen::Vector3d;

/// Rigid world<-sensor transform.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose identity() { return {}; }
  static Pose from_yaw(double yaw, const Vec3& translation);

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Pose inverse() const;
  Pose operator*(const Pose& rhs) const;

  /// RᵀR = I and det(R) = +1 within `tolerance`.
  bool is_rigid(double tolerance = 1e-6) const;
};

/// Transform taking points of frame `to` into frame `from` coordinates,
/// i.e. from⁻¹ · to for world<-sensor poses.
Pose relative_pose(const Pose& from, const Pose& to);

struct PointCloudFrame {
  std::vector<Vec3> points;
  double timestamp = 0.0;
  std::size_t frame_index = 0;

  bool valid() const { return !points.empty(); }
};

struct Sequence {
  std::vector<PointCloudFrame> frames;
  std::vector<Pose> poses;
  std::vector<Vec3> ground_truth_positions;
  // Synthetic sequences only: per frame, per point, the generator's object id
  // (-1 for ground). Empty for real datasets.
  std::vector<std::vector<int>> point_labels;

  std::size_t size() const { return frames.size(); }
  /// Throws Error(format) when the parallel arrays disagree in length or
  /// timestamps are not strictly increasing.
  void validate() const;
};

}  // namespace locus

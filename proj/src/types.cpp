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

#include "locus/types.hpp"

#include <cmath>
#include <string>

#include "locus/error.hpp"

namespace locus {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "I/O error";
    case ErrorCode::format: return "format error";
    case ErrorCode::parameter: return "parameter error";
    case ErrorCode::numerical: return "numerical error";
    case ErrorCode::degenerate: return "degenerate input";
    case ErrorCode::ordering: return "ordering error";
    case ErrorCode::empty_frame: return "empty frame";
    case ErrorCode::no_revisits: return "no revisits";
  }
  return "unknown error";
}

Pose Pose::from_yaw(double yaw, const Vec3& translation) {
  Pose p;
  p.rotation = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  p.translation = translation;
  return p;
}

Pose Pose::inverse() const {
  Pose inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

Pose Pose::operator*(const Pose& rhs) const {
  Pose out;
  out.rotation = rotation * rhs.rotation;
  out.translation = rotation * rhs.translation + translation;
  return out;
}

bool Pose::is_rigid(double tolerance) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const double ortho =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity())
          .cwiseAbs()
          .maxCoeff();
  return ortho <= tolerance && std::abs(rotation.determinant() - 1.0) <= tolerance;
}

Pose relative_pose(const Pose& from, const Pose& to) { return from.inverse() * to; }

void Sequence::validate() const {
  if (poses.size() != frames.size() || ground_truth_positions.size() != frames.size()) {
    throw Error(ErrorCode::format,
                "sequence arrays disagree: " + std::to_string(frames.size()) + " frames, " +
                    std::to_string(poses.size()) + " poses, " +
                    std::to_string(ground_truth_positions.size()) + " positions");
  }
  if (!point_labels.empty() && point_labels.size() != frames.size()) {
    throw Error(ErrorCode::format, "label array length does not match frame count");
  }
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (!(frames[i].timestamp > frames[i - 1].timestamp)) {
      throw Error(ErrorCode::format,
                  "timestamps not strictly increasing at frame " + std::to_string(i));
    }
  }
}

}  // namespace locus

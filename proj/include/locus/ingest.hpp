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

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locus/types.hpp"

namespace locus {

/// One packed KITTI velodyne record, exactly as stored on disk.
struct KittiRecord {
  float x, y, z, intensity;
};

// Byte-level codec for the velodyne format: 16 bytes per point, four
// little-endian IEEE-754 floats. `decode_kitti_records` throws
// Error(format) when the length is not a multiple of 16.
std::vector<KittiRecord> decode_kitti_records(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_kitti_records(std::span<const KittiRecord> records);

/// Reads a velodyne .bin file and drops intensity. A 0-byte file yields an
/// empty (invalid) frame.
PointCloudFrame read_kitti_frame(const std::filesystem::path& path);
void write_kitti_frame(const std::filesystem::path& path, const PointCloudFrame& frame);

/// Parses one poses.txt line (12 numbers, row-major 3x4).
Pose parse_pose_line(const std::string& line);
std::vector<Pose> read_poses(const std::filesystem::path& path);
void write_poses(const std::filesystem::path& path, std::span<const Pose> poses);

std::vector<double> read_times(const std::filesystem::path& path);
void write_times(const std::filesystem::path& path, std::span<const double> times);

/// The `Tr:` (velodyne -> camera) transform from a KITTI calib.txt.
Pose read_kitti_calibration(const std::filesystem::path& path);

/// Random access over the frames of a sequence. Implementations must allow
/// concurrent calls to `frame`.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::size_t size() const = 0;
  virtual PointCloudFrame frame(std::size_t index) const = 0;
  virtual Pose pose(std::size_t index) const = 0;
  virtual Vec3 position(std::size_t index) const { return pose(index).translation; }
  virtual double timestamp(std::size_t index) const = 0;
};

/// Adapts an in-memory Sequence.
class SequenceSource final : public FrameSource {
 public:
  explicit SequenceSource(std::shared_ptr<const Sequence> sequence);

  std::size_t size() const override { return sequence_->size(); }
  PointCloudFrame frame(std::size_t index) const override;
  Pose pose(std::size_t index) const override { return sequence_->poses.at(index); }
  Vec3 position(std::size_t index) const override {
    return sequence_->ground_truth_positions.at(index);
  }
  double timestamp(std::size_t index) const override {
    return sequence_->frames.at(index).timestamp;
  }

 private:
  std::shared_ptr<const Sequence> sequence_;
};

struct KittiPaths {
  std::filesystem::path velodyne_dir;
  std::filesystem::path poses;
  std::filesystem::path times;  // optional
  std::filesystem::path calib;  // optional
  std::size_t frame_limit = 0;  // 0 = all
};

/// Lazily decodes frames of a KITTI odometry sequence. Without a times file
/// timestamps are synthesized at 10 Hz. With a calib file, camera-frame
/// poses are converted to velodyne-frame poses (Tr⁻¹ · T · Tr).
class KittiSequence final : public FrameSource {
 public:
  explicit KittiSequence(const KittiPaths& paths);

  std::size_t size() const override { return files_.size(); }
  PointCloudFrame frame(std::size_t index) const override;
  Pose pose(std::size_t index) const override { return poses_.at(index); }
  double timestamp(std::size_t index) const override { return times_.at(index); }

 private:
  std::vector<std::filesystem::path> files_;
  std::vector<Pose> poses_;
  std::vector<double> times_;
};

inline constexpr double kKittiFramePeriod = 0.1;

}  // namespace locus

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

#include "locus/ingest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include "locus/error.hpp"

namespace locus {
namespace {

float load_le_float(const std::uint8_t* p) {
  const std::uint32_t bits = std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
                             (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
  return std::bit_cast<float>(bits);
}

void store_le_float(float value, std::uint8_t* p) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  p[0] = static_cast<std::uint8_t>(bits);
  p[1] = static_cast<std::uint8_t>(bits >> 8);
  p[2] = static_cast<std::uint8_t>(bits >> 16);
  p[3] = static_cast<std::uint8_t>(bits >> 24);
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::io, "read failed: " + path.string());
  return bytes;
}

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return in;
}

std::ofstream create_file(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  return out;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::vector<KittiRecord> decode_kitti_records(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 16 != 0) {
    throw Error(ErrorCode::format, "velodyne payload of " + std::to_string(bytes.size()) +
                                       " bytes is not a multiple of 16");
  }
  std::vector<KittiRecord> records(bytes.size() / 16);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::uint8_t* p = bytes.data() + 16 * i;
    records[i] = {load_le_float(p), load_le_float(p + 4), load_le_float(p + 8),
                  load_le_float(p + 12)};
  }
  return records;
}

std::vector<std::uint8_t> encode_kitti_records(std::span<const KittiRecord> records) {
  std::vector<std::uint8_t> bytes(records.size() * 16);
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::uint8_t* p = bytes.data() + 16 * i;
    store_le_float(records[i].x, p);
    store_le_float(records[i].y, p + 4);
    store_le_float(records[i].z, p + 8);
    store_le_float(records[i].intensity, p + 12);
  }
  return bytes;
}

PointCloudFrame read_kitti_frame(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  std::vector<KittiRecord> records;
  try {
    records = decode_kitti_records(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
  PointCloudFrame frame;
  frame.points.reserve(records.size());
  for (const auto& r : records) {
    frame.points.emplace_back(r.x, r.y, r.z);
  }
  return frame;
}

void write_kitti_frame(const std::filesystem::path& path, const PointCloudFrame& frame) {
  std::vector<KittiRecord> records;
  records.reserve(frame.points.size());
  for (const auto& p : frame.points) {
    records.push_back({static_cast<float>(p.x()), static_cast<float>(p.y()),
                       static_cast<float>(p.z()), 0.0f});
  }
  const auto bytes = encode_kitti_records(records);
  auto out = create_file(path, true);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io, "write failed: " + path.string());
}

Pose parse_pose_line(const std::string& line) {
  std::istringstream in(line);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw Error(ErrorCode::format, "pose line has non-numeric token '" + token + "'");
    }
  }
  if (values.size() != 12) {
    throw Error(ErrorCode::format,
                "pose line has " + std::to_string(values.size()) + " tokens, expected 12");
  }
  Pose pose;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) pose.rotation(r, c) = values[4 * r + c];
    pose.translation(r) = values[4 * r + 3];
  }
  return pose;
}

std::vector<Pose> read_poses(const std::filesystem::path& path) {
  auto in = open_text(path);
  std::vector<Pose> poses;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      poses.push_back(parse_pose_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return poses;
}

void write_poses(const std::filesystem::path& path, std::span<const Pose> poses) {
  auto out = create_file(path, false);
  out << std::setprecision(17);
  for (const auto& p : poses) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) out << p.rotation(r, c) << ' ';
      out << p.translation(r) << (r == 2 ? '\n' : ' ');
    }
  }
}

std::vector<double> read_times(const std::filesystem::path& path) {
  auto in = open_text(path);
  std::vector<double> times;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    std::istringstream ls(line);
    double t = 0.0;
    std::string rest;
    if (!(ls >> t) || (ls >> rest)) {
      throw Error(ErrorCode::format,
                  path.string() + ":" + std::to_string(line_no) + ": expected one number");
    }
    times.push_back(t);
  }
  return times;
}

void write_times(const std::filesystem::path& path, std::span<const double> times) {
  auto out = create_file(path, false);
  out << std::setprecision(17);
  for (double t : times) out << t << '\n';
}

Pose read_kitti_calibration(const std::filesystem::path& path) {
  auto in = open_text(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("Tr:", 0) == 0) return parse_pose_line(line.substr(3));
  }
  throw Error(ErrorCode::format, path.string() + ": no 'Tr:' entry");
}

SequenceSource::SequenceSource(std::shared_ptr<const Sequence> sequence)
    : sequence_(std::move(sequence)) {
  sequence_->validate();
}

PointCloudFrame SequenceSource::frame(std::size_t index) const {
  return sequence_->frames.at(index);
}

KittiSequence::KittiSequence(const KittiPaths& paths) {
  std::error_code ec;
  if (!std::filesystem::is_directory(paths.velodyne_dir, ec)) {
    throw Error(ErrorCode::io, "velodyne directory not found: " + paths.velodyne_dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(paths.velodyne_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".bin") {
      files_.push_back(entry.path());
    }
  }
  std::sort(files_.begin(), files_.end());
  if (paths.frame_limit > 0 && files_.size() > paths.frame_limit) {
    files_.resize(paths.frame_limit);
  }
  if (files_.empty()) {
    throw Error(ErrorCode::io, "no .bin frames in " + paths.velodyne_dir.string());
  }

  poses_ = read_poses(paths.poses);
  if (poses_.size() < files_.size()) {
    throw Error(ErrorCode::format, "poses file has " + std::to_string(poses_.size()) +
                                       " entries for " + std::to_string(files_.size()) +
                                       " frames");
  }
  poses_.resize(files_.size());
  if (!paths.calib.empty()) {
    const Pose tr = read_kitti_calibration(paths.calib);
    const Pose tr_inv = tr.inverse();
    for (auto& p : poses_) p = tr_inv * p * tr;
  }

  if (!paths.times.empty()) {
    times_ = read_times(paths.times);
    if (times_.size() < files_.size()) {
      throw Error(ErrorCode::format, "times file shorter than frame list");
    }
    times_.resize(files_.size());
  } else {
    times_.resize(files_.size());
    for (std::size_t i = 0; i < times_.size(); ++i) {
      times_[i] = kKittiFramePeriod * static_cast<double>(i);
    }
  }
}

PointCloudFrame KittiSequence::frame(std::size_t index) const {
  PointCloudFrame f;
  try {
    f = read_kitti_frame(files_.at(index));
  } catch (const Error& e) {
    throw Error(e.code(), "frame " + std::to_string(index) + ": " + e.what());
  }
  f.frame_index = index;
  f.timestamp = times_[index];
  return f;
}

}  // namespace locus

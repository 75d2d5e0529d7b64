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

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "locus/ingest.hpp"
#include "locus/types.hpp"

namespace locus {

enum class Primitive { box, cylinder, ellipsoid };

const char* to_string(Primitive p);
Primitive primitive_from_string(const std::string& name);

// Scene parameters for the synthetic generator. Distances in meters, times in
// seconds. The sensor drives along `waypoints` (a closed loop when
// `closed_loop`), one frame every `frame_period` at `speed`; every lap after
// the first is shifted left by `lap_lateral_offset` so revisits are near but
// not identical. World objects are scattered beside the path at a density of
// `objects_per_scene` per `scene_length` of path.
struct SyntheticSpec {
  std::vector<Eigen::Vector2d> waypoints;
  bool closed_loop = true;
  double speed = 2.0;
  double frame_period = 1.0;
  std::size_t frame_count = 0;  // 0 = one traversal of the path
  double lap_lateral_offset = 0.0;

  std::size_t objects_per_scene = 10;
  double scene_length = 60.0;
  std::vector<Primitive> primitives{Primitive::box, Primitive::cylinder, Primitive::ellipsoid};
  std::size_t template_count = 0;  // 0 = every object has its own random size
  double min_half_extent = 0.4;
  double max_half_extent = 1.4;
  double object_base_height = 0.5;
  double min_lateral = 5.0;
  double max_lateral = 25.0;
  double min_object_gap = 1.5;

  double sensor_height = 1.7;
  double max_range = 40.0;
  double point_density = 150.0;     // object surface samples per m²
  std::size_t ground_points = 20000;
  bool visible_only = true;     // drop samples on surfaces facing away from the sensor
  double falloff_range = 0.0;   // beyond this range keep samples with prob (falloff/r)²; 0 = off
  double noise_stddev = 0.0;
};

void to_json(nlohmann::json& j, const SyntheticSpec& spec);
/// Rejects unknown keys and out-of-range values with Error(parameter).
void from_json(const nlohmann::json& j, SyntheticSpec& spec);
void validate(const SyntheticSpec& spec);

struct WorldObject {
  int id = 0;
  Primitive type = Primitive::box;
  Vec3 center = Vec3::Zero();      // world frame
  Vec3 half_extents = Vec3::Ones();  // box half sizes; cylinder (r, r, h/2); ellipsoid semi-axes
  double yaw = 0.0;
};

struct LabeledFrame {
  PointCloudFrame frame;
  std::vector<int> labels;  // object id per point, -1 for ground
};

/// A deterministic synthetic world: every frame is a pure function of
/// (spec, seed, frame index), so frames can be rendered lazily and in any
/// order.
class SyntheticScene final : public FrameSource {
 public:
  SyntheticScene(SyntheticSpec spec, std::uint64_t seed);

  std::size_t size() const override { return poses_.size(); }
  PointCloudFrame frame(std::size_t index) const override { return render(index).frame; }
  Pose pose(std::size_t index) const override { return poses_.at(index); }
  double timestamp(std::size_t index) const override {
    return spec_.frame_period * static_cast<double>(index);
  }

  LabeledFrame render(std::size_t index) const;
  const std::vector<WorldObject>& objects() const { return objects_; }
  const SyntheticSpec& spec() const { return spec_; }

 private:
  void build_trajectory();
  void place_objects();

  SyntheticSpec spec_;
  std::uint64_t seed_;
  std::vector<Pose> poses_;
  std::vector<WorldObject> objects_;
};

Sequence generate_synthetic_sequence(const SyntheticSpec& spec, std::uint64_t seed);

/// The looped benchmark scene: a 100 x 50 m rectangle driven for 200 frames
/// at 2 m per frame (one and a third laps), later laps shifted 1 m sideways,
/// 2 cm range noise.
SyntheticSpec looped_benchmark_spec();

/// Rectangular closed loop of `width` x `height` meters starting at the origin.
std::vector<Eigen::Vector2d> rectangle_loop(double width, double height);

}  // namespace locus

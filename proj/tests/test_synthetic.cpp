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

#include <map>
#include <set>

#include "locus/segmentation.hpp"
#include "support.hpp"

using namespace locus;
using test::error_code_of;

namespace {

bool same_frames(const PointCloudFrame& a, const PointCloudFrame& b) {
  return a.timestamp == b.timestamp && a.points == b.points;
}

}  // namespace

TEST_CASE("same spec and seed give bitwise-identical sequences") {
  const auto spec = test::small_spec(6);
  const Sequence a = generate_synthetic_sequence(spec, 11);
  const Sequence b = generate_synthetic_sequence(spec, 11);
  REQUIRE(a.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(same_frames(a.frames[i], b.frames[i]));
    CHECK(a.point_labels[i] == b.point_labels[i]);
    CHECK(a.poses[i].translation == b.poses[i].translation);
  }
  const Sequence c = generate_synthetic_sequence(spec, 12);
  CHECK_FALSE(same_frames(a.frames[0], c.frames[0]));
}

TEST_CASE("frames render independently of order") {
  const SyntheticScene scene(test::small_spec(5), 3);
  const auto late = scene.render(4);
  const auto early = scene.render(0);
  CHECK(same_frames(scene.render(4).frame, late.frame));
  CHECK(same_frames(scene.render(0).frame, early.frame));
}

TEST_CASE("straight trajectory with 1 m steps has unit relative translation") {
  SyntheticSpec s = test::small_spec(5);
  s.speed = 1.0;
  s.frame_period = 1.0;
  const SyntheticScene scene(s, 1);
  for (std::size_t i = 1; i < scene.size(); ++i) {
    const Pose rel = relative_pose(scene.pose(i - 1), scene.pose(i));
    CHECK((rel.translation - Vec3(1, 0, 0)).norm() < 1e-12);
    CHECK(scene.timestamp(i) - scene.timestamp(i - 1) == doctest::Approx(1.0));
  }
}

TEST_CASE("a revisited waypoint sees the same world objects") {
  SyntheticSpec s;
  s.waypoints = rectangle_loop(40.0, 20.0);  // 120 m loop
  s.speed = 2.0;
  s.frame_count = 61;                        // frame 60 is back at the start
  s.noise_stddev = 0.0;
  s.ground_points = 0;
  const SyntheticScene scene(s, 5);
  CHECK((scene.pose(0).translation - scene.pose(60).translation).norm() < 1e-9);
  const auto a = scene.render(0), b = scene.render(60);
  std::set<int> ids_a(a.labels.begin(), a.labels.end()), ids_b(b.labels.begin(), b.labels.end());
  CHECK(ids_a == ids_b);
  CHECK(scene.timestamp(60) == doctest::Approx(60.0));
}

TEST_CASE("later laps are offset sideways") {
  SyntheticSpec s;
  s.waypoints = rectangle_loop(40.0, 20.0);
  s.frame_count = 61;
  s.lap_lateral_offset = 1.5;
  const SyntheticScene scene(s, 5);
  CHECK((scene.pose(0).translation - scene.pose(60).translation).norm() == doctest::Approx(1.5));
}

TEST_CASE("open paths turn back at the end") {
  SyntheticSpec s = test::small_spec(0);
  s.frame_count = 41;  // 40 m at 2 m/frame: 20 steps out, 20 back
  const SyntheticScene scene(s, 1);
  CHECK((scene.pose(40).translation - scene.pose(0).translation).norm() < 1e-9);
  CHECK((scene.pose(30).translation - scene.pose(10).translation).norm() < 1e-9);
}

TEST_CASE("10 objects, no noise: segmentation finds exactly 10 segments") {
  SyntheticSpec s;
  s.waypoints = {{0.0, 0.0}};
  s.frame_count = 3;
  s.objects_per_scene = 10;
  s.noise_stddev = 0.0;
  const SyntheticScene scene(s, 21);
  REQUIRE(scene.objects().size() == 10);
  for (std::size_t i = 0; i < scene.size(); ++i) {
    CHECK(segment_frame(scene.frame(i), SegmentationConfig{}).size() == 10);
  }
}

TEST_CASE("labels mark ground and object points") {
  const SyntheticScene scene(test::small_spec(2), 4);
  const auto f = scene.render(1);
  REQUIRE(f.labels.size() == f.frame.points.size());
  std::map<int, std::size_t> counts;
  for (int l : f.labels) ++counts[l];
  CHECK(counts[-1] == scene.spec().ground_points);
  for (const auto& [id, n] : counts) {
    if (id < 0) continue;
    CHECK(id < static_cast<int>(scene.objects().size()));
  }
}

TEST_CASE("visible-only sampling keeps only surfaces facing the sensor") {
  SyntheticSpec s;
  s.waypoints = {{0.0, 0.0}};
  s.frame_count = 1;
  s.objects_per_scene = 6;
  s.ground_points = 0;
  s.noise_stddev = 0.0;
  const auto visible = SyntheticScene(s, 9).render(0);
  s.visible_only = false;
  const auto full = SyntheticScene(s, 9).render(0);
  CHECK(visible.frame.points.size() < full.frame.points.size() * 0.7);
  CHECK(visible.frame.points.size() > full.frame.points.size() * 0.3);
}

TEST_CASE("spec JSON round trip and validation") {
  SyntheticSpec s = looped_benchmark_spec();
  s.template_count = 4;
  s.primitives = {Primitive::cylinder};
  nlohmann::json j;
  to_json(j, s);
  SyntheticSpec back;
  from_json(j, back);
  nlohmann::json j2;
  to_json(j2, back);
  CHECK(j == j2);

  j["bogus"] = 1;
  CHECK(error_code_of([&] { from_json(j, back); }) == ErrorCode::parameter);
  SyntheticSpec bad = s;
  bad.min_half_extent = 2.0;
  bad.max_half_extent = 1.0;
  CHECK(error_code_of([&] { validate(bad); }) == ErrorCode::parameter);
  bad = s;
  bad.speed = -1.0;
  CHECK(error_code_of([&] { validate(bad); }) == ErrorCode::parameter);
  CHECK(error_code_of([] { primitive_from_string("torus"); }) == ErrorCode::parameter);
}

TEST_CASE("looped benchmark: 200 frames with at least 20% revisits") {
  const SyntheticScene scene(looped_benchmark_spec(), 1);
  REQUIRE(scene.size() == 200);
  std::size_t revisits = 0;
  for (std::size_t q = 0; q < scene.size(); ++q) {
    for (std::size_t c = 0; c < q; ++c) {
      if (scene.timestamp(q) - scene.timestamp(c) >= 30.0 &&
          (scene.position(q) - scene.position(c)).norm() < 3.0) {
        ++revisits;
        break;
      }
    }
  }
  CHECK(revisits >= 40);
}

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

#include "locus/benchmark.hpp"
#include "locus/pipeline.hpp"
#include "support.hpp"

using namespace locus;
using test::error_code_of;

namespace {

std::shared_ptr<const DescriptorExtractor> default_extractor() {
  return std::make_shared<DefaultExtractor>();
}

}  // namespace

TEST_CASE("every mode yields a unit 4096-d descriptor") {
  const SyntheticScene scene(test::small_spec(4), 2);
  Describer d(DescriberConfig{}, default_extractor());
  CHECK(d.descriptor_dimension() == 4096);
  const auto frames = describe_source(scene, d);
  REQUIRE(frames.size() == 4);
  for (const auto& f : frames) {
    CHECK(f.segment_count > 0);
    for (auto m : kAllModes) {
      REQUIRE(f.descriptor(m));
      CHECK(f.descriptor(m)->size() == 4096);
      CHECK(f.descriptor(m)->values.norm() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(f.descriptor(m)->values.allFinite());
    }
    CHECK(f.max_weight_error < 1e-9);
  }
  CHECK(frames[0].temporal_links == 0);
  CHECK(frames[3].temporal_links > 0);
}

TEST_CASE("parallel analysis is bitwise identical to serial") {
  const SyntheticScene scene(test::small_spec(9), 3);
  Describer a(DescriberConfig{}, default_extractor()), b(DescriberConfig{}, default_extractor());
  const auto serial = describe_source(scene, a, 1);
  const auto parallel = describe_source(scene, b, 3);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].correspondences == parallel[i].correspondences);
    for (auto m : kAllModes) CHECK(serial[i].descriptor(m)->values == parallel[i].descriptor(m)->values);
  }
}

TEST_CASE("structural mode ignores neighbours and history") {
  const SyntheticScene scene(test::small_spec(3), 4);
  Describer d(DescriberConfig{}, default_extractor(), {PoolingMode::structural});
  auto frame = scene.frame(2);
  frame.frame_index = 2;
  const auto analysis = d.analyze(frame);
  const auto expect = aggregate(analysis.features, analysis.features, 0.5);
  const auto got = d.advance(analysis, scene.pose(2));
  CHECK(got.descriptor(PoolingMode::structural)->values == expect.values);
  CHECK_FALSE(got.descriptor(PoolingMode::spatial));
}

TEST_CASE("empty frames produce no descriptor but keep the window moving") {
  Describer d(DescriberConfig{}, default_extractor());
  PointCloudFrame f;
  f.points = {{1, 2, 0}, {3, 4, 0}, {5, 6, 0}};
  f.frame_index = 0;
  const auto out = d.describe(f, Pose::identity());
  CHECK(out.empty());
  CHECK_FALSE(out.descriptor(PoolingMode::spatiotemporal));
  f.frame_index = 0;
  CHECK(error_code_of([&] { d.describe(f, Pose::identity()); }) == ErrorCode::ordering);
}

TEST_CASE("mode names") {
  for (auto m : kAllModes) CHECK(pooling_mode_from_string(to_string(m)) == m);
  CHECK(error_code_of([] { pooling_mode_from_string("both"); }) == ErrorCode::parameter);
}

TEST_CASE("benchmark on a small loop is deterministic and complete") {
  SyntheticSpec s;
  s.waypoints = rectangle_loop(40.0, 20.0);
  s.frame_count = 90;
  s.ground_points = 5000;
  const SyntheticScene scene(s, 2);
  BenchmarkConfig cfg;
  const auto a = run_benchmark(scene, cfg);
  const auto b = run_benchmark(scene, cfg);
  for (auto m : kAllModes) {
    const auto& ra = a.report(m);
    CHECK(ra.f1_max == b.report(m).f1_max);
    CHECK(ra.pr.size() == b.report(m).pr.size());
    CHECK(ra.f1_max >= 0.0);
    CHECK(ra.f1_max <= 1.0);
    CHECK(ra.ep >= 0.0);
    CHECK(ra.ep <= 1.0);
    CHECK(ra.revisit_count > 0);
  }
  CHECK(a.max_weight_error < 1e-9);
  CHECK(a.skipped_frames.empty());
}

TEST_CASE("rotation perturbation keeps the pose consistent with the cloud") {
  const SyntheticScene scene(test::small_spec(2), 5);
  auto frame = scene.frame(1);
  Pose pose = scene.pose(1);
  const Vec3 world = pose.apply(frame.points[0]);
  random_rotation(9)(1, frame, pose);
  CHECK((pose.apply(frame.points[0]) - world).norm() < 1e-9);
  CHECK(error_code_of([] { random_occlusion(-1.0, 1); }) == ErrorCode::parameter);
}

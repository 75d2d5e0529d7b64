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

#include <algorithm>
#include <limits>
#include <numbers>

#include "locus/error.hpp"
#include "rng.hpp"

namespace locus {

std::vector<QueryRecord> online_queries(std::span<const FrameDescription> frames,
                                        const FrameSource& source, PoolingMode mode,
                                        const RetrievalConfig& retrieval,
                                        const EvaluationConfig& evaluation,
                                        Database* database_out) {
  Database db(retrieval);
  std::vector<QueryRecord> records;
  const double always = std::numeric_limits<double>::infinity();
  for (const auto& f : frames) {
    const auto& g = f.descriptor(mode);
    if (!g) continue;
    const Vec3 position = source.position(f.frame_index);
    const QueryResult res = db.query(*g, f.timestamp, always);
    records.push_back(make_query_record(res, f.frame_index, position, db, evaluation));
    db.insert({*g, f.timestamp, position, f.frame_index});
  }
  if (database_out) *database_out = std::move(db);
  return records;
}

BenchmarkResult run_benchmark(const FrameSource& source, const BenchmarkConfig& config,
                              const FramePerturbation& perturb) {
  validate(config.evaluation);
  Describer describer(config.describer, make_extractor(config.extractor), config.modes);
  BenchmarkResult result;
  result.frames = describe_source(source, describer, config.workers, perturb);
  for (const auto& f : result.frames) {
    if (f.empty()) result.skipped_frames.push_back(f.frame_index);
    result.max_weight_error = std::max(result.max_weight_error, f.max_weight_error);
  }
  for (auto mode : config.modes) {
    const auto records =
        online_queries(result.frames, source, mode, config.retrieval, config.evaluation);
    result.reports[static_cast<std::size_t>(mode)] = sweep(records, config.evaluation);
  }
  return result;
}

FramePerturbation random_rotation(std::uint64_t seed) {
  return [seed](std::size_t index, PointCloudFrame& frame, Pose& pose) {
    detail::Rng rng(detail::mix_seed(seed, index));
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    frame = rotate_frame(frame, angle);
    // Keep odometry consistent with the rotated cloud: world <- sensor'
    // becomes pose · Rz(-angle).
    pose = pose * Pose::from_yaw(-angle, Vec3::Zero());
  };
}

FramePerturbation random_occlusion(double theta_occ_deg, std::uint64_t seed) {
  if (!(theta_occ_deg >= 0.0 && theta_occ_deg <= 360.0)) {
    throw Error(ErrorCode::parameter, "occlusion angle must lie in [0, 360]");
  }
  return [theta_occ_deg, seed](std::size_t index, PointCloudFrame& frame, Pose&) {
    detail::Rng rng(detail::mix_seed(seed, index));
    frame = occlude_frame(frame, theta_occ_deg, rng.uniform(0.0, 360.0));
  };
}

}  // namespace locus

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
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locus/evaluation.hpp"
#include "locus/pipeline.hpp"
#include "locus/retrieval.hpp"

namespace locus {

struct BenchmarkConfig {
  DescriberConfig describer;
  std::string extractor = "default";
  RetrievalConfig retrieval;
  EvaluationConfig evaluation;
  std::vector<PoolingMode> modes{kAllModes.begin(), kAllModes.end()};
  std::size_t workers = 1;
};

struct BenchmarkResult {
  std::array<std::optional<EvalReport>, 4> reports;  // by PoolingMode
  std::vector<FrameDescription> frames;
  std::vector<std::size_t> skipped_frames;  // no segments → no descriptor
  double max_weight_error = 0.0;

  const EvalReport& report(PoolingMode mode) const {
    return reports[static_cast<std::size_t>(mode)].value();
  }
};

/// Builds the database for one mode in frame order and records each frame's
/// top-1 query against the entries inserted before it. Frames without a
/// descriptor are left out.
std::vector<QueryRecord> online_queries(std::span<const FrameDescription> frames,
                                        const FrameSource& source, PoolingMode mode,
                                        const RetrievalConfig& retrieval,
                                        const EvaluationConfig& evaluation,
                                        Database* database_out = nullptr);

/// Describes the sequence once and scores every requested pooling mode.
BenchmarkResult run_benchmark(const FrameSource& source, const BenchmarkConfig& config,
                              const FramePerturbation& perturb = {});

/// Seeded per-frame perturbations used by the robustness harness.
FramePerturbation random_rotation(std::uint64_t seed);
FramePerturbation random_occlusion(double theta_occ_deg, std::uint64_t seed);

}  // namespace locus

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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "locus/config.hpp"

namespace locus {

using Logger = std::function<void(const std::string&)>;

inline constexpr const char* kVersion = "0.1.0";

struct DescribeSummary {
  std::size_t frames = 0;
  std::vector<std::size_t> skipped_frames;
  std::size_t dimension = 0;
};

/// Writes descriptors_<mode>.bin, index.txt, timing.csv and manifest.json
/// into config.output_dir.
DescribeSummary cmd_describe(const PipelineConfig& config, const Logger& log = {});

/// Scores every configured mode, from config.database_dir when set or by
/// describing the dataset on the fly. Writes report.txt, report_<mode>.txt,
/// pr_<mode>.csv, decisions_<mode>.csv, summary.json and manifest.json.
std::array<std::optional<EvalReport>, 4> cmd_evaluate(const PipelineConfig& config,
                                                      const Logger& log = {});

struct RobustnessSummary {
  struct Row {
    double theta_deg = 0.0;
    std::array<std::optional<double>, 4> f1_max;  // by PoolingMode
  };
  std::array<std::optional<double>, 4> baseline;
  std::vector<Row> occlusion;
  std::array<std::optional<double>, 4> rotated;  // empty when rotation is off
  std::optional<double> rotation_delta;          // mean over modes of rotated − baseline
};

/// F1max against occlusion angle plus the random-rotation delta. Writes
/// robustness.txt, occlusion.csv, rotation.csv and manifest.json.
RobustnessSummary cmd_robustness(const PipelineConfig& config, const Logger& log = {});

/// Renders the configured synthetic dataset in the KITTI layout
/// (velodyne/NNNNNN.bin, poses.txt, times.txt) plus labels/NNNNNN.label
/// (int32 object id per point, -1 ground), objects.json and spec.json.
std::size_t cmd_synth(const PipelineConfig& config, const Logger& log = {});

}  // namespace locus

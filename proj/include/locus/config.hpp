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

#include "locus/benchmark.hpp"
#include "locus/ingest.hpp"
#include "locus/synthetic.hpp"

namespace locus {

struct DatasetConfig {
  std::string kind = "synthetic";  // "synthetic" | "kitti"
  SyntheticSpec synthetic = looped_benchmark_spec();
  std::uint64_t seed = 1;  // synthetic world seed
  KittiPaths kitti;
  std::size_t frame_limit = 0;  // 0 = whole sequence
};

struct RobustnessConfig {
  std::vector<double> occlusion_angles{0.0, 30.0, 45.0, 90.0, 135.0, 180.0};
  bool rotation = true;
  std::uint64_t seed = 42;
};

/// Everything a CLI run needs. All defaults are the method's published
/// constants; see docs/config.md for the JSON schema.
struct PipelineConfig {
  DatasetConfig dataset;
  DescriberConfig describer;
  std::string extractor = "default";
  RetrievalConfig retrieval;
  EvaluationConfig evaluation;
  std::vector<PoolingMode> modes{kAllModes.begin(), kAllModes.end()};
  RobustnessConfig robustness;
  std::size_t workers = 1;
  std::string output_dir = "locus_out";
  std::string database_dir;  // evaluate: existing describe output; empty = build on the fly

  BenchmarkConfig benchmark() const;
};

nlohmann::json to_json(const PipelineConfig& config);

/// Overlays `j` onto the defaults. Unknown keys, wrong types and
/// out-of-range values raise Error(parameter).
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::string& path);
void validate(const PipelineConfig& config);

/// Applies "a.b.c=value". The value is parsed as JSON when possible and
/// taken as a string otherwise. The key must already exist in the schema.
void apply_override(PipelineConfig& config, const std::string& assignment);

/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const PipelineConfig& config);

/// The frame source described by `config.dataset`.
std::unique_ptr<FrameSource> open_dataset(const PipelineConfig& config);

}  // namespace locus

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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "locus/aggregation.hpp"
#include "locus/ingest.hpp"
#include "locus/segment_features.hpp"
#include "locus/segmentation.hpp"
#include "locus/spatiotemporal.hpp"

namespace locus {

/// Choice of f_b paired with f_a in second-order pooling.
enum class PoolingMode { structural = 0, spatial = 1, temporal = 2, spatiotemporal = 3 };

inline constexpr std::array<PoolingMode, 4> kAllModes{
    PoolingMode::structural, PoolingMode::spatial, PoolingMode::temporal,
    PoolingMode::spatiotemporal};

const char* to_string(PoolingMode mode);
PoolingMode pooling_mode_from_string(const std::string& name);

struct DescriberConfig {
  SegmentationConfig segmentation;
  SpatiotemporalConfig pooling;
  double alpha = 0.5;
};

void validate(const DescriberConfig& config);

struct FrameTiming {
  double segmentation_ms = 0.0;
  double features_ms = 0.0;
  double pooling_ms = 0.0;
  double aggregation_ms = 0.0;
};

/// Order-independent part of describing a frame.
struct FrameAnalysis {
  std::size_t frame_index = 0;
  double timestamp = 0.0;
  SegmentSet segments;
  Eigen::MatrixXd features;  // m x d
  std::vector<Vec3> centroids;
  PooledFeatures spatial;
  FrameTiming timing;
};

struct FrameDescription {
  std::size_t frame_index = 0;
  double timestamp = 0.0;
  std::size_t segment_count = 0;
  std::array<std::optional<GlobalDescriptor>, 4> descriptors;  // by PoolingMode
  CorrespondenceMap correspondences;  // to the previous frame
  std::size_t temporal_links = 0;     // segments with a non-empty chain
  double max_weight_error = 0.0;      // max |Σw − 1| over all φ and ψ
  FrameTiming timing;

  const std::optional<GlobalDescriptor>& descriptor(PoolingMode mode) const {
    return descriptors[static_cast<std::size_t>(mode)];
  }
  bool empty() const { return segment_count == 0; }
};

/// Turns frames into global descriptors. `analyze` is pure and may run on
/// several frames concurrently; `advance` must see frames in order.
class Describer {
 public:
  Describer(DescriberConfig config, std::shared_ptr<const DescriptorExtractor> extractor,
            std::vector<PoolingMode> modes = {kAllModes.begin(), kAllModes.end()});

  FrameAnalysis analyze(const PointCloudFrame& frame) const;
  /// Analysis of an already segmented frame.
  FrameAnalysis analyze_segments(SegmentSet segments, double timestamp) const;
  FrameDescription advance(FrameAnalysis analysis, const Pose& pose);
  FrameDescription describe(const PointCloudFrame& frame, const Pose& pose);

  void reset() { window_.clear(); }
  const DescriberConfig& config() const { return config_; }
  const DescriptorExtractor& extractor() const { return *extractor_; }
  std::size_t descriptor_dimension() const {
    return extractor_->dimension() * extractor_->dimension();
  }

 private:
  DescriberConfig config_;
  std::shared_ptr<const DescriptorExtractor> extractor_;
  std::vector<PoolingMode> modes_;
  FrameWindow window_;
};

/// Hook to alter a frame (and its pose) before description, used by the
/// robustness tests.
using FramePerturbation = std::function<void(std::size_t index, PointCloudFrame&, Pose&)>;

/// Describes every frame of `source` in order. Analysis runs on up to
/// `workers` threads; the temporal stage stays sequential.
std::vector<FrameDescription> describe_source(const FrameSource& source, Describer& describer,
                                              std::size_t workers = 1,
                                              const FramePerturbation& perturb = {});

}  // namespace locus

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

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "locus/convex_hull.hpp"
#include "locus/segmentation.hpp"
#include "locus/types.hpp"

namespace locus {

struct SpatiotemporalConfig {
  std::size_t k_s = 5;
  std::size_t k_t = 3;
  double beta = 0.1;
  double radius_r = 1.0;
  std::size_t knn_feature_k = 8;
};

void validate(const SpatiotemporalConfig& config);

/// Minimum distance between the hull vertex sets of two segments.
double mtd(const ConvexHull& a, const ConvexHull& b);
double mtd(const Segment& a, const Segment& b);

struct GraphEdge {
  std::size_t target = 0;
  double distance = 0.0;
};

/// Directed kNN graph over the segments of one frame.
struct SegmentGraph {
  std::vector<std::vector<GraphEdge>> out_edges;  // sorted by (distance, target)
  std::size_t k_s = 0;

  std::size_t vertex_count() const { return out_edges.size(); }
};

SegmentGraph build_spatial_graph(std::span<const ConvexHull> hulls, std::size_t k_s);

/// softmax(-beta · distance) over one neighbourhood. Summation follows the
/// given order, so equal inputs in equal order give bitwise-equal outputs.
std::vector<double> softmax_weights(std::span<const double> distances, double beta);

/// Pooled features (one row per segment) plus the weight vector used for
/// each row; an empty weight vector marks a self-fallback row.
struct PooledFeatures {
  Eigen::MatrixXd values;
  std::vector<std::vector<double>> weights;
};

/// Φ: softmax-weighted mean of neighbours' structural features. Segments
/// without out-edges keep their own feature.
PooledFeatures spatial_pool(const SegmentGraph& graph, const Eigen::MatrixXd& features,
                            double beta);

/// Per current-frame segment, the matched previous-frame segment (if any).
using CorrespondenceMap = std::vector<std::optional<std::size_t>>;

/// What the temporal stage keeps of a processed frame.
struct FrameRecord {
  std::size_t frame_index = 0;
  Pose pose;
  Eigen::MatrixXd features;  // m x d structural features
  std::vector<Vec3> centroids;
  CorrespondenceMap to_previous;  // into the preceding record; empty for the first
};

/// Matches each segment of `current` to `previous`: the intersection of the
/// feature-space kNN and the pose-compensated centroid radius search, then
/// the smallest feature distance (ties: centroid distance, then lower id).
CorrespondenceMap correspond(const FrameRecord& current, const FrameRecord& previous,
                             const SpatiotemporalConfig& config);

/// The last k_t + 1 frames, oldest first.
class FrameWindow {
 public:
  explicit FrameWindow(std::size_t k_t) : k_t_(k_t) {}

  /// Computes `record.to_previous` against the newest held frame, then
  /// appends, evicting the oldest beyond k_t + 1. Frame indices must
  /// increase.
  void advance(FrameRecord record, const SpatiotemporalConfig& config);

  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }
  /// age 0 = newest frame.
  const FrameRecord& at_age(std::size_t age) const { return frames_.at(frames_.size() - 1 - age); }
  const FrameRecord& newest() const { return frames_.back(); }
  std::size_t k_t() const { return k_t_; }

  void clear() { frames_.clear(); }

 private:
  std::size_t k_t_;
  std::deque<FrameRecord> frames_;
};

/// For each segment of the newest frame, the segment indices it chains to in
/// frames n-1, n-2, ... (length k_c <= k_t; stops at the first missing link).
std::vector<std::vector<std::size_t>> correspondence_chains(const FrameWindow& window);

/// Ψ: softmax(-beta · feature distance) weighted mean over each chain.
/// Empty chains keep the segment's own feature.
PooledFeatures temporal_pool(const FrameWindow& window,
                             const std::vector<std::vector<std::size_t>>& chains, double beta);

/// f_b = (Φ + Ψ) / 2.
Eigen::MatrixXd spatiotemporal_feature(const Eigen::MatrixXd& spatial,
                                       const Eigen::MatrixXd& temporal);

}  // namespace locus

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

#include "locus/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "locus/error.hpp"

namespace locus {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

double weight_error(const std::vector<std::vector<double>>& weights) {
  double worst = 0.0;
  for (const auto& w : weights) {
    if (w.empty()) continue;
    double sum = 0.0;
    for (double x : w) sum += x;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

}  // namespace

const char* to_string(PoolingMode mode) {
  switch (mode) {
    case PoolingMode::structural: return "structural";
    case PoolingMode::spatial: return "spatial";
    case PoolingMode::temporal: return "temporal";
    case PoolingMode::spatiotemporal: return "spatiotemporal";
  }
  return "?";
}

PoolingMode pooling_mode_from_string(const std::string& name) {
  for (auto m : kAllModes) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::parameter, "unknown pooling mode '" + name + "'");
}

void validate(const DescriberConfig& c) {
  validate(c.segmentation);
  validate(c.pooling);
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) {
    throw Error(ErrorCode::parameter, "aggregation: alpha must be finite and > 0");
  }
}

Describer::Describer(DescriberConfig config, std::shared_ptr<const DescriptorExtractor> extractor,
                     std::vector<PoolingMode> modes)
    : config_(std::move(config)),
      extractor_(std::move(extractor)),
      modes_(std::move(modes)),
      window_(config_.pooling.k_t) {
  validate(config_);
  if (!extractor_) throw Error(ErrorCode::parameter, "describer: no extractor");
  if (modes_.empty()) throw Error(ErrorCode::parameter, "describer: no pooling modes requested");
}

FrameAnalysis Describer::analyze(const PointCloudFrame& frame) const {
  const auto start = Clock::now();
  SegmentSet segments = segment_frame(frame, config_.segmentation);
  const double seg_ms = elapsed_ms(start);
  FrameAnalysis a = analyze_segments(std::move(segments), frame.timestamp);
  a.frame_index = frame.frame_index;
  a.segments.source_frame_index = frame.frame_index;
  a.timing.segmentation_ms = seg_ms;
  return a;
}

FrameAnalysis Describer::analyze_segments(SegmentSet segments, double timestamp) const {
  FrameAnalysis a;
  a.frame_index = segments.source_frame_index;
  a.timestamp = timestamp;
  a.segments = std::move(segments);
  const std::size_t m = a.segments.size();
  const auto d = static_cast<Eigen::Index>(extractor_->dimension());

  auto start = Clock::now();
  const auto features = extractor_->extract(a.segments);
  if (features.size() != m) {
    throw Error(ErrorCode::format, "extractor returned " + std::to_string(features.size()) +
                                       " features for " + std::to_string(m) + " segments");
  }
  a.features.resize(static_cast<Eigen::Index>(m), d);
  for (std::size_t i = 0; i < m; ++i) {
    if (features[i].values.size() != d) {
      throw Error(ErrorCode::format, "extractor returned a feature of wrong dimension");
    }
    a.features.row(static_cast<Eigen::Index>(i)) = features[i].values.transpose();
  }
  a.centroids.reserve(m);
  for (const auto& s : a.segments.segments) a.centroids.push_back(s.centroid);
  a.timing.features_ms = elapsed_ms(start);

  start = Clock::now();
  std::vector<ConvexHull> hulls;
  hulls.reserve(m);
  for (const auto& s : a.segments.segments) hulls.push_back(convex_hull(s.points));
  const SegmentGraph graph = build_spatial_graph(hulls, config_.pooling.k_s);
  a.spatial = spatial_pool(graph, a.features, config_.pooling.beta);
  a.timing.pooling_ms = elapsed_ms(start);
  return a;
}

FrameDescription Describer::advance(FrameAnalysis a, const Pose& pose) {
  FrameDescription out;
  out.frame_index = a.frame_index;
  out.timestamp = a.timestamp;
  out.segment_count = a.segments.size();
  out.timing = a.timing;

  auto start = Clock::now();
  FrameRecord record;
  record.frame_index = a.frame_index;
  record.pose = pose;
  record.features = a.features;
  record.centroids = a.centroids;
  window_.advance(std::move(record), config_.pooling);
  out.correspondences = window_.newest().to_previous;
  const auto chains = correspondence_chains(window_);
  const PooledFeatures temporal = temporal_pool(window_, chains, config_.pooling.beta);
  out.temporal_links = static_cast<std::size_t>(
      std::count_if(chains.begin(), chains.end(), [](const auto& c) { return !c.empty(); }));
  out.max_weight_error = std::max(weight_error(a.spatial.weights), weight_error(temporal.weights));
  out.timing.pooling_ms += elapsed_ms(start);

  if (out.segment_count == 0) return out;

  start = Clock::now();
  for (auto mode : modes_) {
    Eigen::MatrixXd fb;
    switch (mode) {
      case PoolingMode::structural: fb = a.features; break;
      case PoolingMode::spatial: fb = a.spatial.values; break;
      case PoolingMode::temporal: fb = temporal.values; break;
      case PoolingMode::spatiotemporal:
        fb = spatiotemporal_feature(a.spatial.values, temporal.values);
        break;
    }
    out.descriptors[static_cast<std::size_t>(mode)] = aggregate(a.features, fb, config_.alpha);
  }
  out.timing.aggregation_ms = elapsed_ms(start);
  return out;
}

FrameDescription Describer::describe(const PointCloudFrame& frame, const Pose& pose) {
  return advance(analyze(frame), pose);
}

std::vector<FrameDescription> describe_source(const FrameSource& source, Describer& describer,
                                              std::size_t workers,
                                              const FramePerturbation& perturb) {
  const std::size_t n = source.size();
  workers = std::max<std::size_t>(workers, 1);
  const std::size_t batch = workers == 1 ? 1 : 4 * workers;

  std::vector<FrameDescription> out;
  out.reserve(n);
  for (std::size_t begin = 0; begin < n; begin += batch) {
    const std::size_t end = std::min(n, begin + batch);
    std::vector<FrameAnalysis> analyses(end - begin);
    std::vector<Pose> poses(end - begin);

    auto work = [&](std::size_t i) {
      PointCloudFrame frame = source.frame(i);
      frame.frame_index = i;
      frame.timestamp = source.timestamp(i);
      Pose pose = source.pose(i);
      if (perturb) perturb(i, frame, pose);
      analyses[i - begin] = describer.analyze(frame);
      poses[i - begin] = pose;
    };

    if (workers == 1) {
      for (std::size_t i = begin; i < end; ++i) work(i);
    } else {
      std::atomic<std::size_t> next{begin};
      std::exception_ptr failure;
      std::mutex failure_mutex;
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < std::min(workers, end - begin); ++w) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < end; i = next++) {
            try {
              work(i);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
      pool.clear();
      if (failure) std::rethrow_exception(failure);
    }

    for (std::size_t i = begin; i < end; ++i) {
      out.push_back(describer.advance(std::move(analyses[i - begin]), poses[i - begin]));
    }
  }
  return out;
}

}  // namespace locus

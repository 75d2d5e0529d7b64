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

#include "locus/spatiotemporal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "locus/error.hpp"

namespace locus {
namespace {

// Σ w_k r_k for weights summing to 1, written as r_0 + Σ w_k (r_k − r_0):
// equal rows then pool to exactly that row, and one row to itself.
template <typename RowAt>
Eigen::RowVectorXd weighted_mean(const std::vector<double>& w, RowAt row_at) {
  const Eigen::RowVectorXd anchor = row_at(0);
  Eigen::RowVectorXd out = anchor;
  for (std::size_t k = 1; k < w.size(); ++k) out += w[k] * (row_at(k) - anchor);
  return out;
}

}  // namespace

void validate(const SpatiotemporalConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::parameter, std::string("pooling: ") + what);
  };
  require(c.k_s >= 1, "k_s must be >= 1");
  require(c.beta >= 0.0 && std::isfinite(c.beta), "beta must be finite and >= 0");
  require(c.radius_r > 0.0, "radius_r must be > 0");
  require(c.knn_feature_k >= 1, "knn_feature_k must be >= 1");
}

double mtd(const ConvexHull& a, const ConvexHull& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a.vertices) {
    for (const auto& q : b.vertices) {
      best = std::min(best, (p - q).squaredNorm());
    }
  }
  return std::sqrt(best);
}

double mtd(const Segment& a, const Segment& b) {
  return mtd(convex_hull(a.points), convex_hull(b.points));
}

SegmentGraph build_spatial_graph(std::span<const ConvexHull> hulls, std::size_t k_s) {
  const std::size_t m = hulls.size();
  SegmentGraph graph;
  graph.k_s = k_s;
  graph.out_edges.resize(m);

  std::vector<double> dist(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      dist[i * m + j] = dist[j * m + i] = mtd(hulls[i], hulls[j]);
    }
  }

  const std::size_t degree = m > 0 ? std::min(k_s, m - 1) : 0;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<GraphEdge> candidates;
    candidates.reserve(m - 1);
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) candidates.push_back({j, dist[i * m + j]});
    }
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(degree),
                      candidates.end(), [](const GraphEdge& a, const GraphEdge& b) {
                        return a.distance != b.distance ? a.distance < b.distance
                                                        : a.target < b.target;
                      });
    candidates.resize(degree);
    graph.out_edges[i] = std::move(candidates);
  }
  return graph;
}

std::vector<double> softmax_weights(std::span<const double> distances, double beta) {
  std::vector<double> w(distances.size());
  if (distances.empty()) return w;
  // Shifting by the smallest distance leaves the softmax unchanged and keeps
  // exp() away from underflow.
  const double shift = *std::min_element(distances.begin(), distances.end());
  double total = 0.0;
  for (std::size_t k = 0; k < distances.size(); ++k) {
    w[k] = std::exp(-beta * (distances[k] - shift));
    total += w[k];
  }
  for (auto& x : w) x /= total;
  return w;
}

PooledFeatures spatial_pool(const SegmentGraph& graph, const Eigen::MatrixXd& features,
                            double beta) {
  if (static_cast<std::size_t>(features.rows()) != graph.vertex_count()) {
    throw Error(ErrorCode::parameter, "spatial_pool: feature rows do not match graph vertices");
  }
  PooledFeatures out;
  out.values = Eigen::MatrixXd::Zero(features.rows(), features.cols());
  out.weights.resize(graph.vertex_count());
  for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
    const auto& edges = graph.out_edges[i];
    const auto row = static_cast<Eigen::Index>(i);
    if (edges.empty()) {
      out.values.row(row) = features.row(row);
      continue;
    }
    std::vector<double> d(edges.size());
    std::transform(edges.begin(), edges.end(), d.begin(),
                   [](const GraphEdge& e) { return e.distance; });
    out.weights[i] = softmax_weights(d, beta);
    out.values.row(row) = weighted_mean(out.weights[i], [&](std::size_t k) {
      return features.row(static_cast<Eigen::Index>(edges[k].target));
    });
  }
  return out;
}

CorrespondenceMap correspond(const FrameRecord& current, const FrameRecord& previous,
                             const SpatiotemporalConfig& config) {
  const auto m = static_cast<std::size_t>(current.features.rows());
  const auto m_prev = static_cast<std::size_t>(previous.features.rows());
  CorrespondenceMap map(m);
  if (m_prev == 0 || m == 0) return map;
  if (current.centroids.size() != m || previous.centroids.size() != m_prev) {
    throw Error(ErrorCode::parameter, "correspond: centroid count does not match features");
  }

  const Pose to_previous = relative_pose(previous.pose, current.pose);
  const std::size_t k = std::min(config.knn_feature_k, m_prev);
  const double r2 = config.radius_r * config.radius_r;

  std::vector<double> feat_dist(m_prev), cent_dist2(m_prev);
  std::vector<std::size_t> order(m_prev);
  for (std::size_t i = 0; i < m; ++i) {
    const auto fi = current.features.row(static_cast<Eigen::Index>(i));
    const Vec3 c = to_previous.apply(current.centroids[i]);
    for (std::size_t j = 0; j < m_prev; ++j) {
      feat_dist[j] = (fi - previous.features.row(static_cast<Eigen::Index>(j))).norm();
      cent_dist2[j] = (c - previous.centroids[j]).squaredNorm();
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return feat_dist[a] != feat_dist[b] ? feat_dist[a] < feat_dist[b] : a < b;
                      });

    std::optional<std::size_t> best;
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t j = order[r];
      if (cent_dist2[j] > r2) continue;
      if (!best) {
        best = j;
        continue;
      }
      const std::size_t b = *best;
      const bool better =
          feat_dist[j] != feat_dist[b] ? feat_dist[j] < feat_dist[b]
          : cent_dist2[j] != cent_dist2[b] ? cent_dist2[j] < cent_dist2[b]
                                           : j < b;
      if (better) best = j;
    }
    map[i] = best;
  }
  return map;
}

void FrameWindow::advance(FrameRecord record, const SpatiotemporalConfig& config) {
  if (!frames_.empty()) {
    if (record.frame_index <= frames_.back().frame_index) {
      throw Error(ErrorCode::ordering, "frame window: frame index " +
                                           std::to_string(record.frame_index) +
                                           " does not follow " +
                                           std::to_string(frames_.back().frame_index));
    }
    record.to_previous = correspond(record, frames_.back(), config);
  } else {
    record.to_previous.assign(static_cast<std::size_t>(record.features.rows()), std::nullopt);
  }
  frames_.push_back(std::move(record));
  while (frames_.size() > k_t_ + 1) frames_.pop_front();
}

std::vector<std::vector<std::size_t>> correspondence_chains(const FrameWindow& window) {
  if (window.empty()) return {};
  const FrameRecord& newest = window.newest();
  const auto m = static_cast<std::size_t>(newest.features.rows());
  const std::size_t depth = std::min(window.k_t(), window.size() - 1);
  std::vector<std::vector<std::size_t>> chains(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t cur = i;
    for (std::size_t age = 0; age < depth; ++age) {
      const auto& link = window.at_age(age).to_previous;
      if (cur >= link.size() || !link[cur]) break;
      cur = *link[cur];
      chains[i].push_back(cur);
    }
  }
  return chains;
}

PooledFeatures temporal_pool(const FrameWindow& window,
                             const std::vector<std::vector<std::size_t>>& chains, double beta) {
  const FrameRecord& newest = window.newest();
  if (chains.size() != static_cast<std::size_t>(newest.features.rows())) {
    throw Error(ErrorCode::parameter, "temporal_pool: chain count does not match segments");
  }
  PooledFeatures out;
  out.values = Eigen::MatrixXd::Zero(newest.features.rows(), newest.features.cols());
  out.weights.resize(chains.size());
  for (std::size_t i = 0; i < chains.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const auto fi = newest.features.row(row);
    const auto& chain = chains[i];
    if (chain.empty()) {
      out.values.row(row) = fi;
      continue;
    }
    std::vector<double> d(chain.size());
    for (std::size_t k = 0; k < chain.size(); ++k) {
      d[k] = (fi - window.at_age(k + 1).features.row(static_cast<Eigen::Index>(chain[k]))).norm();
    }
    out.weights[i] = softmax_weights(d, beta);
    out.values.row(row) = weighted_mean(out.weights[i], [&](std::size_t k) {
      return window.at_age(k + 1).features.row(static_cast<Eigen::Index>(chain[k]));
    });
  }
  return out;
}

Eigen::MatrixXd spatiotemporal_feature(const Eigen::MatrixXd& spatial,
                                       const Eigen::MatrixXd& temporal) {
  if (spatial.rows() != temporal.rows() || spatial.cols() != temporal.cols()) {
    throw Error(ErrorCode::parameter, "spatiotemporal_feature: shape mismatch");
  }
  return (spatial + temporal) / 2.0;
}

}  // namespace locus

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

#include "locus/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "locus/error.hpp"
#include "rng.hpp"

namespace locus {
namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n), rank(n, 0) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
  }

  std::vector<std::size_t> parent;
  std::vector<std::uint8_t> rank;
};

constexpr std::int64_t kCellBias = std::int64_t{1} << 20;

std::uint64_t pack_cell(std::int64_t x, std::int64_t y, std::int64_t z) {
  return (static_cast<std::uint64_t>(x + kCellBias) << 42) |
         (static_cast<std::uint64_t>(y + kCellBias) << 21) |
         static_cast<std::uint64_t>(z + kCellBias);
}

std::size_t count_inliers(const std::vector<Vec3>& points, const Vec3& n, double offset,
                          double threshold) {
  std::size_t count = 0;
  for (const auto& p : points) {
    if (std::abs(n.dot(p) + offset) <= threshold) ++count;
  }
  return count;
}

}  // namespace

void validate(const SegmentationConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::parameter, std::string("segmentation: ") + what);
  };
  require(c.cluster_distance > 0.0, "cluster_distance must be > 0");
  require(c.min_points >= 1 && c.max_points >= c.min_points, "point bounds invalid");
  require(c.max_range > 0.0, "max_range must be > 0");
  require(c.ransac_iterations >= 1, "ransac_iterations must be >= 1");
  require(c.ransac_threshold > 0.0, "ransac_threshold must be > 0");
  require(c.normal_cone_deg > 0.0 && c.normal_cone_deg <= 90.0, "normal_cone_deg out of (0, 90]");
  require(c.min_ground_fraction >= 0.0 && c.min_ground_fraction <= 1.0,
          "min_ground_fraction out of [0, 1]");
  require(c.fallback_percentile >= 0.0 && c.fallback_percentile <= 1.0,
          "fallback_percentile out of [0, 1]");
}

GroundRemoval remove_ground(const PointCloudFrame& frame, const SegmentationConfig& config) {
  const auto& pts = frame.points;
  if (pts.empty()) throw Error(ErrorCode::parameter, "remove_ground: empty frame");

  const double cos_cone = std::cos(config.normal_cone_deg * std::numbers::pi / 180.0);
  detail::Rng rng(config.ransac_seed);

  Vec3 best_normal = Vec3::UnitZ();
  double best_offset = 0.0;
  std::size_t best_count = 0;
  if (pts.size() >= 3) {
    for (int it = 0; it < config.ransac_iterations; ++it) {
      const std::size_t a = rng.index(pts.size());
      const std::size_t b = rng.index(pts.size());
      const std::size_t c = rng.index(pts.size());
      if (a == b || b == c || a == c) continue;
      Vec3 n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
      const double norm = n.norm();
      if (norm < 1e-12) continue;
      n /= norm;
      if (n.z() < 0.0) n = -n;
      if (n.z() < cos_cone) continue;
      const double offset = -n.dot(pts[a]);
      const std::size_t count = count_inliers(pts, n, offset, config.ransac_threshold);
      if (count > best_count) {
        best_count = count;
        best_normal = n;
        best_offset = offset;
      }
    }
  }

  // Least-squares refinement over the consensus set.
  if (best_count >= 3) {
    Vec3 mean = Vec3::Zero();
    for (const auto& p : pts) {
      if (std::abs(best_normal.dot(p) + best_offset) <= config.ransac_threshold) mean += p;
    }
    mean /= static_cast<double>(best_count);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : pts) {
      if (std::abs(best_normal.dot(p) + best_offset) <= config.ransac_threshold) {
        const Vec3 d = p - mean;
        cov += d * d.transpose();
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    Vec3 n = eig.eigenvectors().col(0);
    if (n.z() < 0.0) n = -n;
    if (n.z() >= cos_cone) {
      const double offset = -n.dot(mean);
      const std::size_t count = count_inliers(pts, n, offset, config.ransac_threshold);
      if (count >= best_count) {
        best_count = count;
        best_normal = n;
        best_offset = offset;
      }
    }
  }

  GroundRemoval out;
  out.cloud.timestamp = frame.timestamp;
  out.cloud.frame_index = frame.frame_index;

  const double needed = config.min_ground_fraction * static_cast<double>(pts.size());
  if (best_count > 0 && static_cast<double>(best_count) >= needed) {
    out.plane = {best_normal, best_offset, false};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (std::abs(best_normal.dot(pts[i]) + best_offset) > config.ransac_threshold) {
        out.cloud.points.push_back(pts[i]);
        out.kept_indices.push_back(i);
      }
    }
    return out;
  }

  std::vector<double> z(pts.size());
  std::transform(pts.begin(), pts.end(), z.begin(), [](const Vec3& p) { return p.z(); });
  const auto rank = static_cast<std::size_t>(
      std::floor(config.fallback_percentile * static_cast<double>(z.size() - 1)));
  std::nth_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(rank), z.end());
  const double floor_z = z[rank];
  out.plane = {Vec3::UnitZ(), -floor_z, true};
  const double cut = floor_z + config.ransac_threshold;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].z() >= cut) {
      out.cloud.points.push_back(pts[i]);
      out.kept_indices.push_back(i);
    }
  }
  return out;
}

Vec3 centroid_of(const std::vector<Vec3>& points) {
  Vec3 sum = Vec3::Zero();
  for (const auto& p : points) sum += p;
  return points.empty() ? sum : Vec3(sum / static_cast<double>(points.size()));
}

SegmentSet extract_segments(const PointCloudFrame& frame, const SegmentationConfig& config) {
  SegmentSet out;
  out.source_frame_index = frame.frame_index;
  const auto& pts = frame.points;
  const std::size_t n = pts.size();
  if (n == 0) return out;

  const double cell = config.cluster_distance;
  const double radius2 = cell * cell;

  struct Keyed {
    std::uint64_t key;
    std::size_t index;
  };
  std::vector<Keyed> keyed(n);
  std::vector<std::array<std::int64_t, 3>> cells(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) {
      const double c = std::floor(pts[i][a] / cell);
      if (!(std::abs(c) < static_cast<double>(kCellBias))) {
        throw Error(ErrorCode::parameter, "extract_segments: point coordinate out of range");
      }
      cells[i][a] = static_cast<std::int64_t>(c);
    }
    keyed[i] = {pack_cell(cells[i][0], cells[i][1], cells[i][2]), i};
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return a.key != b.key ? a.key < b.key : a.index < b.index;
  });

  // Cell ranges in the sorted order.
  std::vector<std::uint64_t> cell_keys;
  std::vector<std::size_t> cell_begin;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || keyed[i].key != keyed[i - 1].key) {
      cell_keys.push_back(keyed[i].key);
      cell_begin.push_back(i);
    }
  }
  cell_begin.push_back(n);

  auto find_cell = [&](std::uint64_t key) -> std::ptrdiff_t {
    auto it = std::lower_bound(cell_keys.begin(), cell_keys.end(), key);
    if (it == cell_keys.end() || *it != key) return -1;
    return it - cell_keys.begin();
  };

  DisjointSets sets(n);
  for (std::size_t c = 0; c + 1 < cell_begin.size(); ++c) {
    const std::size_t first = keyed[cell_begin[c]].index;
    const auto& base = cells[first];
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dz = -1; dz <= 1; ++dz) {
          const std::uint64_t key = pack_cell(base[0] + dx, base[1] + dy, base[2] + dz);
          // Visit each unordered cell pair once.
          if (key < cell_keys[c]) continue;
          const std::ptrdiff_t other = find_cell(key);
          if (other < 0) continue;
          const bool same = static_cast<std::size_t>(other) == c;
          for (std::size_t i = cell_begin[c]; i < cell_begin[c + 1]; ++i) {
            const std::size_t pi = keyed[i].index;
            const std::size_t j0 = same ? i + 1 : cell_begin[static_cast<std::size_t>(other)];
            for (std::size_t j = j0; j < cell_begin[static_cast<std::size_t>(other) + 1]; ++j) {
              const std::size_t pj = keyed[j].index;
              if ((pts[pi] - pts[pj]).squaredNorm() < radius2) sets.unite(pi, pj);
            }
          }
        }
      }
    }
  }

  // Group by root in ascending index order so ids follow discovery order.
  std::vector<std::ptrdiff_t> component_of_root(n, -1);
  std::vector<std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    if (component_of_root[root] < 0) {
      component_of_root[root] = static_cast<std::ptrdiff_t>(components.size());
      components.emplace_back();
    }
    components[static_cast<std::size_t>(component_of_root[root])].push_back(i);
  }

  for (auto& members : components) {
    if (members.size() < config.min_points || members.size() > config.max_points) continue;
    Segment s;
    s.id = out.segments.size();
    s.points.reserve(members.size());
    for (std::size_t idx : members) s.points.push_back(pts[idx]);
    s.centroid = centroid_of(s.points);
    s.source_indices = std::move(members);
    out.segments.push_back(std::move(s));
  }
  return out;
}

SegmentSet segment_frame(const PointCloudFrame& frame, const SegmentationConfig& config) {
  if (frame.points.empty()) {
    SegmentSet empty;
    empty.source_frame_index = frame.frame_index;
    return empty;
  }
  GroundRemoval ground = remove_ground(frame, config);

  PointCloudFrame in_range;
  in_range.frame_index = frame.frame_index;
  in_range.timestamp = frame.timestamp;
  std::vector<std::size_t> original;
  const double range2 = config.max_range * config.max_range;
  for (std::size_t i = 0; i < ground.cloud.points.size(); ++i) {
    if (ground.cloud.points[i].squaredNorm() <= range2) {
      in_range.points.push_back(ground.cloud.points[i]);
      original.push_back(ground.kept_indices[i]);
    }
  }

  SegmentSet set = extract_segments(in_range, config);
  for (auto& s : set.segments) {
    for (auto& idx : s.source_indices) idx = original[idx];
  }
  set.ground = ground.plane;
  return set;
}

}  // namespace locus

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

#include "locus/convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace locus {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Face {
  std::array<std::size_t, 3> v;
  Vec3 normal;
  double offset = 0.0;
  std::vector<std::size_t> outside;
  std::size_t farthest = kNone;
  double farthest_distance = 0.0;
  bool alive = true;
};

std::uint64_t edge_key(std::size_t a, std::size_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

class QuickHull {
 public:
  QuickHull(std::span<const Vec3> points, double eps) : pts_(points), eps_(eps) {}

  bool build() {
    std::array<std::size_t, 4> simplex{};
    if (!initial_simplex(simplex)) return false;
    seed_faces(simplex);
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      // Faces created while expanding are appended, so one pass suffices.
      while (faces_[f].alive && !faces_[f].outside.empty()) expand(f);
    }
    return true;
  }

  ConvexHull result() const {
    std::vector<std::size_t> used;
    for (const auto& f : faces_) {
      if (!f.alive) continue;
      used.insert(used.end(), f.v.begin(), f.v.end());
    }
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());

    ConvexHull hull;
    std::unordered_map<std::size_t, std::size_t> remap;
    for (std::size_t i = 0; i < used.size(); ++i) {
      remap[used[i]] = i;
      hull.vertices.push_back(pts_[used[i]]);
    }
    for (const auto& f : faces_) {
      if (!f.alive) continue;
      hull.faces.push_back({remap.at(f.v[0]), remap.at(f.v[1]), remap.at(f.v[2])});
    }
    return hull;
  }

 private:
  double distance(const Face& f, std::size_t p) const { return f.normal.dot(pts_[p]) + f.offset; }

  bool initial_simplex(std::array<std::size_t, 4>& s) const {
    std::array<std::size_t, 6> extremes{};
    for (int a = 0; a < 3; ++a) {
      std::size_t lo = 0, hi = 0;
      for (std::size_t i = 1; i < pts_.size(); ++i) {
        if (pts_[i][a] < pts_[lo][a]) lo = i;
        if (pts_[i][a] > pts_[hi][a]) hi = i;
      }
      extremes[2 * a] = lo;
      extremes[2 * a + 1] = hi;
    }
    double best = -1.0;
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) {
        const double d = (pts_[extremes[i]] - pts_[extremes[j]]).squaredNorm();
        if (d > best) {
          best = d;
          s[0] = extremes[i];
          s[1] = extremes[j];
        }
      }
    }
    if (std::sqrt(best) <= eps_) return false;

    const Vec3 a = pts_[s[0]];
    const Vec3 dir = (pts_[s[1]] - a).normalized();
    best = -1.0;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      const Vec3 d = pts_[i] - a;
      const double dist = (d - dir * dir.dot(d)).squaredNorm();
      if (dist > best) {
        best = dist;
        s[2] = i;
      }
    }
    if (std::sqrt(best) <= eps_) return false;

    const Vec3 n = (pts_[s[1]] - a).cross(pts_[s[2]] - a).normalized();
    best = -1.0;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      const double dist = std::abs(n.dot(pts_[i] - a));
      if (dist > best) {
        best = dist;
        s[3] = i;
      }
    }
    return best > eps_;
  }

  std::size_t add_face(std::size_t a, std::size_t b, std::size_t c) {
    Face f;
    f.v = {a, b, c};
    f.normal = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
    const double len = f.normal.norm();
    if (len > 0.0) f.normal /= len;
    f.offset = -f.normal.dot(pts_[a]);
    const std::size_t id = faces_.size();
    edges_[edge_key(a, b)] = id;
    edges_[edge_key(b, c)] = id;
    edges_[edge_key(c, a)] = id;
    faces_.push_back(std::move(f));
    return id;
  }

  void assign(std::size_t p, const std::vector<std::size_t>& candidates) {
    std::size_t best_face = kNone;
    double best = eps_;
    for (std::size_t f : candidates) {
      const double d = distance(faces_[f], p);
      if (d > best) {
        best = d;
        best_face = f;
      }
    }
    if (best_face == kNone) return;
    Face& f = faces_[best_face];
    f.outside.push_back(p);
    if (best > f.farthest_distance) {
      f.farthest_distance = best;
      f.farthest = p;
    }
  }

  void seed_faces(const std::array<std::size_t, 4>& s) {
    const Vec3 inner = (pts_[s[0]] + pts_[s[1]] + pts_[s[2]] + pts_[s[3]]) / 4.0;
    const std::array<std::array<std::size_t, 3>, 4> tris{
        {{s[0], s[1], s[2]}, {s[0], s[3], s[1]}, {s[0], s[2], s[3]}, {s[1], s[3], s[2]}}};
    std::vector<std::size_t> ids;
    for (auto t : tris) {
      const Vec3 n = (pts_[t[1]] - pts_[t[0]]).cross(pts_[t[2]] - pts_[t[0]]);
      if (n.dot(inner - pts_[t[0]]) > 0.0) std::swap(t[1], t[2]);
      ids.push_back(add_face(t[0], t[1], t[2]));
    }
    for (std::size_t p = 0; p < pts_.size(); ++p) {
      if (p == s[0] || p == s[1] || p == s[2] || p == s[3]) continue;
      assign(p, ids);
    }
  }

  void expand(std::size_t start) {
    const std::size_t eye = faces_[start].farthest;

    std::vector<std::size_t> visible{start};
    std::vector<char> is_visible(faces_.size(), 0);
    is_visible[start] = 1;
    std::vector<std::size_t> rejected;
    for (std::size_t k = 0; k < visible.size(); ++k) {
      const auto v = faces_[visible[k]].v;
      for (int e = 0; e < 3; ++e) {
        const std::size_t g = edges_.at(edge_key(v[(e + 1) % 3], v[e]));
        if (is_visible[g] || !faces_[g].alive) continue;
        if (distance(faces_[g], eye) > eps_) {
          is_visible[g] = 1;
          visible.push_back(g);
        }
      }
    }

    std::vector<std::pair<std::size_t, std::size_t>> horizon;
    std::vector<std::size_t> orphans;
    for (std::size_t f : visible) {
      const auto v = faces_[f].v;
      for (int e = 0; e < 3; ++e) {
        const std::size_t g = edges_.at(edge_key(v[(e + 1) % 3], v[e]));
        if (!is_visible[g]) horizon.emplace_back(v[e], v[(e + 1) % 3]);
      }
      for (std::size_t p : faces_[f].outside) {
        if (p != eye) orphans.push_back(p);
      }
    }
    for (std::size_t f : visible) {
      Face& face = faces_[f];
      face.alive = false;
      face.outside.clear();
      face.outside.shrink_to_fit();
      for (int e = 0; e < 3; ++e) {
        auto it = edges_.find(edge_key(face.v[e], face.v[(e + 1) % 3]));
        if (it != edges_.end() && it->second == f) edges_.erase(it);
      }
    }

    std::vector<std::size_t> created;
    created.reserve(horizon.size());
    for (const auto& [a, b] : horizon) created.push_back(add_face(a, b, eye));
    std::sort(orphans.begin(), orphans.end());
    for (std::size_t p : orphans) assign(p, created);
  }

  std::span<const Vec3> pts_;
  double eps_;
  std::vector<Face> faces_;
  std::unordered_map<std::uint64_t, std::size_t> edges_;
};

}  // namespace

ConvexHull convex_hull(std::span<const Vec3> points) {
  ConvexHull hull;
  auto fallback = [&] {
    hull.vertices.assign(points.begin(), points.end());
    hull.faces.clear();
    hull.degenerate = true;
    return hull;
  };
  if (points.size() < 4) return fallback();

  Vec3 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = std::max({(hi - lo).maxCoeff(), lo.cwiseAbs().maxCoeff(),
                                 hi.cwiseAbs().maxCoeff(), 1e-300});
  const double eps = 1e-12 * scale;

  QuickHull qh(points, eps);
  if (!qh.build()) return fallback();
  return qh.result();
}

}  // namespace locus

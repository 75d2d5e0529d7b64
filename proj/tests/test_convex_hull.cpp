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

#include <algorithm>
#include <set>

#include "locus/convex_hull.hpp"
#include "support.hpp"

using namespace locus;

namespace {

// A point is a hull vertex iff some direction makes it the unique maximum;
// equivalently it is not in the hull of the others. This O(n⁴) oracle tests
// every triangle of the other points for a separating plane with all other
// points on one side.
std::set<std::size_t> brute_extreme_points(const std::vector<Vec3>& p) {
  const std::size_t n = p.size();
  std::set<std::size_t> out;
  double scale = 0.0;
  for (const auto& q : p) scale = std::max(scale, q.cwiseAbs().maxCoeff());
  const double eps = 1e-10 * scale;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        const Vec3 normal = (p[b] - p[a]).cross(p[c] - p[a]);
        if (normal.norm() < 1e-12) continue;
        bool pos = false, neg = false;
        for (std::size_t k = 0; k < n && !(pos && neg); ++k) {
          const double s = normal.dot(p[k] - p[a]) / normal.norm();
          if (s > eps) pos = true;
          if (s < -eps) neg = true;
        }
        if (pos && neg) continue;
        // A supporting plane: its extreme points are hull vertices if they
        // are corners of the face polygon. Collect the three and let the
        // face test below prune non-corners.
        out.insert(a);
        out.insert(b);
        out.insert(c);
      }
    }
  }
  // Drop points that lie in the interior of a supporting face or edge: a
  // vertex is a strict convex combination of no other two or three points.
  std::set<std::size_t> corners;
  for (auto v : out) {
    bool corner = true;
    for (auto a : out) {
      for (auto b : out) {
        if (a == v || b == v || a >= b) continue;
        const Vec3 ab = p[b] - p[a];
        const double t = (p[v] - p[a]).dot(ab) / ab.squaredNorm();
        if (t > 0.0 && t < 1.0 && (p[a] + t * ab - p[v]).norm() < eps) corner = false;
      }
    }
    if (corner) corners.insert(v);
  }
  return corners;
}

std::set<std::size_t> vertex_indices(const ConvexHull& h, const std::vector<Vec3>& p) {
  std::set<std::size_t> out;
  for (const auto& v : h.vertices) {
    const auto it = std::find(p.begin(), p.end(), v);
    REQUIRE(it != p.end());
    out.insert(static_cast<std::size_t>(it - p.begin()));
  }
  return out;
}

}  // namespace

TEST_CASE("cube corners plus interior points → the 8 corners") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::vector<Vec3> pts;
  for (int i = 0; i < 100; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  for (int c = 0; c < 8; ++c) pts.emplace_back(c & 1, (c >> 1) & 1, (c >> 2) & 1);
  std::shuffle(pts.begin(), pts.end(), rng);
  const auto h = convex_hull(pts);
  CHECK_FALSE(h.degenerate);
  REQUIRE(h.vertices.size() == 8);
  for (const auto& v : h.vertices) {
    for (int k = 0; k < 3; ++k) CHECK((v[k] == 0.0 || v[k] == 1.0));
  }
  CHECK(h.faces.size() == 12);
}

TEST_CASE("coplanar and tiny inputs fall back to the whole set") {
  std::vector<Vec3> plane;
  for (int i = 0; i < 20; ++i) plane.emplace_back(i % 5, i / 5, 2.0);
  auto h = convex_hull(plane);
  CHECK(h.degenerate);
  CHECK(h.vertices == plane);
  CHECK(h.faces.empty());
  const std::vector<Vec3> three{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  CHECK(convex_hull(three).degenerate);
  CHECK(convex_hull(std::vector<Vec3>{}).vertices.empty());
}

TEST_CASE("random blobs: vertices match the extreme-point oracle") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = test::random_points(rng, 25 + trial);
    const auto h = convex_hull(pts);
    CHECK(vertex_indices(h, pts) == brute_extreme_points(pts));
  }
}

TEST_CASE("1000-point blob: faces are outward, supporting, and contain every point") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Vec3> pts;
  for (int i = 0; i < 1000; ++i) pts.emplace_back(n(rng), 2.0 * n(rng), 0.5 * n(rng));
  const auto h = convex_hull(pts);
  REQUIRE_FALSE(h.degenerate);
  // Euler: closed triangulated sphere has F = 2V - 4.
  CHECK(h.faces.size() == 2 * h.vertices.size() - 4);
  for (const auto& f : h.faces) {
    const Vec3 a = h.vertices[f[0]], b = h.vertices[f[1]], c = h.vertices[f[2]];
    const Vec3 normal = (b - a).cross(c - a).normalized();
    for (const auto& p : pts) CHECK(normal.dot(p - a) <= 1e-9);
  }
  // Every hull vertex is the unique maximizer of some direction: check it is
  // extreme for the average normal of its incident faces.
  for (std::size_t v = 0; v < h.vertices.size(); ++v) {
    Vec3 dir = Vec3::Zero();
    for (const auto& f : h.faces) {
      if (f[0] == v || f[1] == v || f[2] == v) {
        const Vec3 a = h.vertices[f[0]], b = h.vertices[f[1]], c = h.vertices[f[2]];
        dir += (b - a).cross(c - a).normalized();
      }
    }
    double best = -1e300;
    for (const auto& p : pts) best = std::max(best, dir.dot(p));
    CHECK(dir.dot(h.vertices[v]) >= best - 1e-9);
  }
  // Vertices come out in input order.
  std::vector<std::size_t> order;
  for (const auto& v : h.vertices) order.push_back(static_cast<std::size_t>(std::find(pts.begin(), pts.end(), v) - pts.begin()));
  CHECK(std::is_sorted(order.begin(), order.end()));
}

TEST_CASE("duplicates and collinear extras do not become vertices") {
  std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.5, 0, 0}, {1, 0, 0}, {0, 0, 0.5}};
  const auto h = convex_hull(pts);
  CHECK(h.vertices.size() == 4);
  CHECK(h.faces.size() == 4);
}

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
#include <span>
#include <vector>

#include "locus/types.hpp"

namespace locus {

struct ConvexHull {
  std::vector<Vec3> vertices;
  // Outward-oriented triangles indexing `vertices`; empty when degenerate.
  std::vector<std::array<std::size_t, 3>> faces;
  // Fewer than 4 points or a (near) coplanar set: `vertices` is then the
  // whole input.
  bool degenerate = false;
};

/// QuickHull. Vertices are emitted in ascending order of their input index.
ConvexHull convex_hull(std::span<const Vec3> points);

}  // namespace locus

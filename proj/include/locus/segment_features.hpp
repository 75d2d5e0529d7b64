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
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "locus/segmentation.hpp"

namespace locus {

inline constexpr std::size_t kFeatureDim = 64;

/// Per-segment structural-appearance feature, unit Euclidean length.
struct StructuralFeature {
  Eigen::VectorXd values;
  bool degenerate = false;
};

/// Pluggable per-segment descriptor. Registered extractors must be
/// deterministic, invariant to point order and to rotations about z.
class DescriptorExtractor {
 public:
  virtual ~DescriptorExtractor() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<StructuralFeature> extract(const SegmentSet& set) const = 0;
};

// Layout of the default 64-d feature.
namespace feature_layout {
inline constexpr std::size_t kShape = 0;        // 7 eigenvalue shape features
inline constexpr std::size_t kExtents = 7;      // 3 log extents, descending
inline constexpr std::size_t kLogCount = 10;
inline constexpr std::size_t kHeight = 11;
inline constexpr std::size_t kBlocks = 12;      // 4x4x2 pooled occupancy
inline constexpr std::size_t kMarginals = 44;   // 8 + 8 + 4 axis profiles
}  // namespace feature_layout

/// Eigenvalue shape descriptors of the point covariance, in order: linearity,
/// planarity, scattering, omnivariance, anisotropy, eigenentropy, change of
/// curvature. All zero when the covariance has rank < 2.
struct ShapeFeatures {
  std::array<double, 7> values{};
  bool degenerate = false;

  double linearity() const { return values[0]; }
  double planarity() const { return values[1]; }
  double scattering() const { return values[2]; }
};

/// From covariance eigenvalues sorted descending.
ShapeFeatures shape_features(const Eigen::Vector3d& eigenvalues_desc);

/// Handcrafted 64-d feature: shape features, PCA-box extents, point count,
/// height above `ground`, and a pooled occupancy grid in the PCA frame.
/// With `centered`, a fixed calibration offset is subtracted before the final
/// normalization.
StructuralFeature extract_default(const Segment& segment, const GroundPlane& ground = {},
                                  bool centered = true);

class DefaultExtractor final : public DescriptorExtractor {
 public:
  explicit DefaultExtractor(bool centered = true) : centered_(centered) {}
  std::string name() const override { return centered_ ? "default" : "default:raw"; }
  std::size_t dimension() const override { return kFeatureDim; }
  std::vector<StructuralFeature> extract(const SegmentSet& set) const override;

 private:
  bool centered_;
};

/// Reads `segment_count` rows of `dimension` numbers; each row is normalized
/// to unit length. Row/segment mismatch → Error(format); a zero row →
/// Error(degenerate) naming the row.
std::vector<StructuralFeature> import_features(const std::filesystem::path& path,
                                               std::size_t segment_count,
                                               std::size_t dimension = kFeatureDim);

/// Loads features from per-frame files. `{frame}` in the pattern is replaced
/// by the 6-digit zero-padded frame index.
class ImportedExtractor final : public DescriptorExtractor {
 public:
  explicit ImportedExtractor(std::string pattern, std::size_t dimension = kFeatureDim);

  std::string name() const override { return "import:" + pattern_; }
  std::size_t dimension() const override { return dimension_; }
  std::vector<StructuralFeature> extract(const SegmentSet& set) const override;

  std::filesystem::path path_for(std::size_t frame_index) const;

 private:
  std::string pattern_;
  std::size_t dimension_;
};

/// "default", "default:raw" or "import:<pattern>".
std::unique_ptr<DescriptorExtractor> make_extractor(const std::string& spec);

}  // namespace locus

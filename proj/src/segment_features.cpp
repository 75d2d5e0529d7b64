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

#include "locus/segment_features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "locus/error.hpp"

namespace locus {
namespace {

constexpr int kGridX = 32, kGridY = 32, kGridZ = 16;
constexpr int kBlock = 8;
constexpr double kLogCountScale = 10.0;
constexpr double kHeightScale = 5.0;

// Mean raw feature over a held-out synthetic calibration scene; subtracting it
// gives signed components so second-order pooling sees contrast rather than a
// shared positive bias. Regenerate with tools/calibrate_features.cpp whenever
// the raw layout changes.
constexpr std::array<double, kFeatureDim> kFeatureOffset{
#include "feature_offset.inc"
};

bool lexicographic_less(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

// Orients `axis` toward the half-space holding more points; ties fall back
// to a non-negative world-z component.
Vec3 orient_axis(Vec3 axis, const std::vector<Vec3>& centered) {
  std::size_t positive = 0, negative = 0;
  for (const auto& q : centered) {
    const double s = axis.dot(q);
    if (s > 0.0) ++positive;
    else if (s < 0.0) ++negative;
  }
  if (negative > positive || (negative == positive && axis.z() < 0.0)) axis = -axis;
  return axis;
}

void normalize_block(Eigen::Ref<Eigen::VectorXd> block) {
  const double n = block.norm();
  if (n > 0.0) block /= n;
}

}  // namespace

ShapeFeatures shape_features(const Eigen::Vector3d& ev) {
  ShapeFeatures out;
  const double l1 = std::max(ev[0], 0.0), l2 = std::max(ev[1], 0.0), l3 = std::max(ev[2], 0.0);
  const double sum = l1 + l2 + l3;
  if (!(l1 > 0.0) || l2 <= 1e-12 * l1) {
    out.degenerate = true;
    return out;
  }
  const double e1 = l1 / sum, e2 = l2 / sum, e3 = l3 / sum;
  double entropy = 0.0;
  for (double e : {e1, e2, e3}) {
    if (e > 0.0) entropy -= e * std::log(e);
  }
  out.values = {(l1 - l2) / l1,
                (l2 - l3) / l1,
                l3 / l1,
                std::cbrt(e1 * e2 * e3),
                (l1 - l3) / l1,
                entropy,
                e3};
  return out;
}

StructuralFeature extract_default(const Segment& segment, const GroundPlane& ground,
                                  bool subtract_offset) {
  namespace L = feature_layout;
  if (segment.points.empty()) {
    throw Error(ErrorCode::parameter, "extract_default: empty segment");
  }

  // Canonical point order makes every accumulation below independent of the
  // input permutation, bit for bit.
  std::vector<Vec3> pts = segment.points;
  std::sort(pts.begin(), pts.end(), lexicographic_less);
  const auto n = static_cast<double>(pts.size());

  Vec3 mean = Vec3::Zero();
  for (const auto& p : pts) mean += p;
  mean /= n;
  std::vector<Vec3> centered(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    centered[i] = pts[i] - mean;
    cov += centered[i] * centered[i].transpose();
  }
  cov /= n;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Vec3 ev_desc(eig.eigenvalues()[2], eig.eigenvalues()[1], eig.eigenvalues()[0]);
  const ShapeFeatures shape = shape_features(ev_desc);

  Eigen::Matrix3d axes;
  for (int k = 0; k < 3; ++k) axes.col(k) = orient_axis(eig.eigenvectors().col(2 - k), centered);

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  std::vector<Vec3> local(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    local[i] = axes.transpose() * centered[i];
    lo = lo.cwiseMin(local[i]);
    hi = hi.cwiseMax(local[i]);
  }
  const Vec3 extent = hi - lo;

  StructuralFeature out;
  out.degenerate = shape.degenerate;
  out.values = Eigen::VectorXd::Zero(kFeatureDim);
  auto& v = out.values;
  for (std::size_t k = 0; k < 7; ++k) v[L::kShape + k] = shape.values[k];

  std::array<double, 3> sorted_extent{extent[0], extent[1], extent[2]};
  std::sort(sorted_extent.begin(), sorted_extent.end(), std::greater<>());
  for (std::size_t k = 0; k < 3; ++k) v[L::kExtents + k] = std::log1p(sorted_extent[k]);
  v[L::kLogCount] = std::log(n) / kLogCountScale;
  v[L::kHeight] = ground.height_of(mean) / kHeightScale;

  // Binary occupancy on a 32x32x16 grid fitted to the PCA box.
  const std::array<int, 3> bins{kGridX, kGridY, kGridZ};
  std::vector<std::uint8_t> occupied(kGridX * kGridY * kGridZ, 0);
  for (const auto& q : local) {
    std::array<int, 3> idx{};
    for (int a = 0; a < 3; ++a) {
      const double span = extent[a] > 1e-9 ? extent[a] : 1.0;
      idx[a] = std::clamp(static_cast<int>(std::floor((q[a] - lo[a]) / span * bins[a])), 0,
                          bins[a] - 1);
    }
    occupied[(idx[0] * kGridY + idx[1]) * kGridZ + idx[2]] = 1;
  }

  constexpr int bx = kGridX / kBlock, by = kGridY / kBlock, bz = kGridZ / kBlock;
  static_assert(bx * by * bz == 32);
  std::array<double, 32> blocks{};
  std::array<double, 8> prof_x{}, prof_y{};
  std::array<double, 4> prof_z{};
  for (int x = 0; x < kGridX; ++x) {
    for (int y = 0; y < kGridY; ++y) {
      for (int z = 0; z < kGridZ; ++z) {
        if (!occupied[(x * kGridY + y) * kGridZ + z]) continue;
        blocks[((x / kBlock) * by + y / kBlock) * bz + z / kBlock] += 1.0;
        prof_x[x / 4] += 1.0;
        prof_y[y / 4] += 1.0;
        prof_z[z / 4] += 1.0;
      }
    }
  }
  for (std::size_t k = 0; k < 32; ++k) v[L::kBlocks + k] = blocks[k];
  for (std::size_t k = 0; k < 8; ++k) v[L::kMarginals + k] = prof_x[k];
  for (std::size_t k = 0; k < 8; ++k) v[L::kMarginals + 8 + k] = prof_y[k];
  for (std::size_t k = 0; k < 4; ++k) v[L::kMarginals + 16 + k] = prof_z[k];
  normalize_block(v.segment(L::kBlocks, 32));
  normalize_block(v.segment(L::kMarginals, 20));

  v /= v.norm();
  if (subtract_offset) {
    const Eigen::VectorXd shifted =
        v - Eigen::Map<const Eigen::VectorXd>(kFeatureOffset.data(), kFeatureDim);
    const double norm = shifted.norm();
    // A segment sitting exactly on the offset keeps its raw direction.
    if (norm > 1e-9) v = shifted / norm;
  }
  return out;
}

std::vector<StructuralFeature> DefaultExtractor::extract(const SegmentSet& set) const {
  std::vector<StructuralFeature> out;
  out.reserve(set.size());
  for (const auto& s : set.segments) out.push_back(extract_default(s, set.ground, centered_));
  return out;
}

std::vector<StructuralFeature> import_features(const std::filesystem::path& path,
                                               std::size_t segment_count,
                                               std::size_t dimension) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open feature file " + path.string());
  std::vector<StructuralFeature> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> values;
    double x = 0.0;
    while (ls >> x) values.push_back(x);
    if (!ls.eof()) {
      throw Error(ErrorCode::format, path.string() + ": non-numeric token in row " +
                                         std::to_string(rows.size()));
    }
    if (values.empty()) continue;
    if (values.size() != dimension) {
      throw Error(ErrorCode::format, path.string() + ": row " + std::to_string(rows.size()) +
                                         " has " + std::to_string(values.size()) +
                                         " values, expected " + std::to_string(dimension));
    }
    StructuralFeature f;
    f.values = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                 static_cast<Eigen::Index>(values.size()));
    rows.push_back(std::move(f));
  }
  if (rows.size() != segment_count) {
    throw Error(ErrorCode::format, path.string() + ": " + std::to_string(rows.size()) +
                                       " feature rows for " + std::to_string(segment_count) +
                                       " segments");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double norm = rows[i].values.norm();
    if (!std::isfinite(norm) || norm == 0.0) {
      throw Error(ErrorCode::degenerate, path.string() + ": feature row " + std::to_string(i) +
                                             " cannot be normalized");
    }
    rows[i].values /= norm;
  }
  return rows;
}

ImportedExtractor::ImportedExtractor(std::string pattern, std::size_t dimension)
    : pattern_(std::move(pattern)), dimension_(dimension) {
  if (pattern_.empty()) throw Error(ErrorCode::parameter, "import extractor: empty pattern");
}

std::filesystem::path ImportedExtractor::path_for(std::size_t frame_index) const {
  char digits[32];
  std::snprintf(digits, sizeof digits, "%06zu", frame_index);
  std::string path = pattern_;
  const std::string token = "{frame}";
  for (auto pos = path.find(token); pos != std::string::npos; pos = path.find(token)) {
    path.replace(pos, token.size(), digits);
  }
  return path;
}

std::vector<StructuralFeature> ImportedExtractor::extract(const SegmentSet& set) const {
  return import_features(path_for(set.source_frame_index), set.size(), dimension_);
}

std::unique_ptr<DescriptorExtractor> make_extractor(const std::string& spec) {
  if (spec == "default") return std::make_unique<DefaultExtractor>();
  if (spec == "default:raw") return std::make_unique<DefaultExtractor>(false);
  if (spec.rfind("import:", 0) == 0) return std::make_unique<ImportedExtractor>(spec.substr(7));
  throw Error(ErrorCode::parameter, "unknown extractor '" + spec + "'");
}

}  // namespace locus

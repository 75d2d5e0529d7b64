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
#include <span>
#include <vector>

#include <Eigen/Core>

namespace locus {

/// Unit-norm flattened descriptor, length d².
struct GlobalDescriptor {
  Eigen::VectorXd values;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

/// Second-order pooling: out(x, y) = max over segments s of fa(s, x) · fb(s, y).
/// Rows are segments. Throws Error(empty_frame) for m = 0.
Eigen::MatrixXd o2p(const Eigen::MatrixXd& fa, const Eigen::MatrixXd& fb);

/// Power-Euclidean transform U · diag(λ^alpha) · Vᵀ over the singular values
/// of `m`; singular values below 1e-12 map to 0.
Eigen::MatrixXd power_euclidean(const Eigen::MatrixXd& m, double alpha = 0.5);

inline constexpr double kSingularFloor = 1e-12;

/// Row-major flatten and L2-normalize. All-zero input → Error(degenerate).
GlobalDescriptor finalize(const Eigen::MatrixXd& m);

/// o2p → power_euclidean → finalize.
GlobalDescriptor aggregate(const Eigen::MatrixXd& fa, const Eigen::MatrixXd& fb, double alpha);

// Descriptor file: 8-byte magic "LOCUSGD1", uint64 d, uint64 count, then
// count x d² float64 values, row-major; all little-endian.
inline constexpr char kDescriptorMagic[9] = "LOCUSGD1";

void write_descriptor_file(const std::filesystem::path& path, std::size_t d,
                           std::span<const GlobalDescriptor> descriptors);

struct DescriptorFile {
  std::size_t d = 0;
  std::vector<GlobalDescriptor> descriptors;
};

DescriptorFile read_descriptor_file(const std::filesystem::path& path);

}  // namespace locus

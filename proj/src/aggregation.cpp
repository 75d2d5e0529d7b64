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

#include "locus/aggregation.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <Eigen/SVD>

#include "locus/error.hpp"

namespace locus {
namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) {
    throw Error(ErrorCode::format, "descriptor file truncated");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::string dump(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os.precision(17);
  os << m;
  return os.str();
}

}  // namespace

Eigen::MatrixXd o2p(const Eigen::MatrixXd& fa, const Eigen::MatrixXd& fb) {
  if (fa.rows() != fb.rows() || fa.cols() != fb.cols()) {
    throw Error(ErrorCode::parameter, "o2p: feature matrices differ in shape");
  }
  if (fa.rows() == 0) throw Error(ErrorCode::empty_frame, "o2p: no segments");
  const Eigen::Index d = fa.cols();
  Eigen::MatrixXd out(d, d);
  for (Eigen::Index x = 0; x < d; ++x) {
    for (Eigen::Index y = 0; y < d; ++y) out(x, y) = fa(0, x) * fb(0, y);
  }
  for (Eigen::Index s = 1; s < fa.rows(); ++s) {
    for (Eigen::Index x = 0; x < d; ++x) {
      const double a = fa(s, x);
      for (Eigen::Index y = 0; y < d; ++y) out(x, y) = std::max(out(x, y), a * fb(s, y));
    }
  }
  return out;
}

Eigen::MatrixXd power_euclidean(const Eigen::MatrixXd& m, double alpha) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::numerical, "power_euclidean: non-finite input\n" + dump(m));
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorCode::numerical, "power_euclidean: SVD did not converge\n" + dump(m));
  }
  Eigen::VectorXd powered = svd.singularValues();
  for (Eigen::Index k = 0; k < powered.size(); ++k) {
    powered[k] = powered[k] < kSingularFloor ? 0.0 : std::pow(powered[k], alpha);
  }
  return svd.matrixU() * powered.asDiagonal() * svd.matrixV().transpose();
}

GlobalDescriptor finalize(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw Error(ErrorCode::numerical, "finalize: non-finite matrix");
  GlobalDescriptor g;
  g.values.resize(m.size());
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) g.values[k++] = m(r, c);
  }
  const double norm = g.values.norm();
  if (norm == 0.0) throw Error(ErrorCode::degenerate, "finalize: all-zero matrix");
  g.values /= norm;
  return g;
}

GlobalDescriptor aggregate(const Eigen::MatrixXd& fa, const Eigen::MatrixXd& fb, double alpha) {
  return finalize(power_euclidean(o2p(fa, fb), alpha));
}

void write_descriptor_file(const std::filesystem::path& path, std::size_t d,
                           std::span<const GlobalDescriptor> descriptors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out.write(kDescriptorMagic, 8);
  put_u64(out, d);
  put_u64(out, descriptors.size());
  for (const auto& g : descriptors) {
    if (g.size() != d * d) {
      throw Error(ErrorCode::parameter, "descriptor length " + std::to_string(g.size()) +
                                            " does not match d² = " + std::to_string(d * d));
    }
    for (Eigen::Index k = 0; k < g.values.size(); ++k) {
      put_u64(out, std::bit_cast<std::uint64_t>(g.values[k]));
    }
  }
  if (!out) throw Error(ErrorCode::io, "write failed: " + path.string());
}

DescriptorFile read_descriptor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kDescriptorMagic, 8) != 0) {
    throw Error(ErrorCode::format, path.string() + ": bad descriptor file magic");
  }
  DescriptorFile file;
  file.d = get_u64(in);
  const std::uint64_t count = get_u64(in);
  if (file.d == 0 || file.d > 4096) {
    throw Error(ErrorCode::format, path.string() + ": implausible descriptor dimension");
  }
  const std::size_t len = file.d * file.d;
  file.descriptors.resize(count);
  for (auto& g : file.descriptors) {
    g.values.resize(static_cast<Eigen::Index>(len));
    for (std::size_t k = 0; k < len; ++k) {
      g.values[static_cast<Eigen::Index>(k)] = std::bit_cast<double>(get_u64(in));
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::format, path.string() + ": trailing bytes after descriptors");
  }
  return file;
}

}  // namespace locus

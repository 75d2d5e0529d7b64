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

#include <fstream>

#include <Eigen/SVD>

#include "locus/aggregation.hpp"
#include "support.hpp"

using namespace locus;
using test::error_code_of;

namespace {

Eigen::MatrixXd o2p_oracle(const Eigen::MatrixXd& fa, const Eigen::MatrixXd& fb) {
  Eigen::MatrixXd out(fa.cols(), fb.cols());
  for (Eigen::Index x = 0; x < fa.cols(); ++x) {
    for (Eigen::Index y = 0; y < fb.cols(); ++y) {
      double best = -std::numeric_limits<double>::infinity();
      for (Eigen::Index s = 0; s < fa.rows(); ++s) best = std::max(best, fa(s, x) * fb(s, y));
      out(x, y) = best;
    }
  }
  return out;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

}  // namespace

TEST_CASE("o2p: single segment is the outer product") {
  Eigen::MatrixXd a(1, 3), b(1, 3);
  a << 1, -2, 3;
  b << 0.5, 4, -1;
  CHECK(o2p(a, b) == a.transpose() * b);
}

TEST_CASE("o2p: duplicated segments change nothing; matches the triple loop") {
  std::mt19937_64 rng(1);
  const auto a = random_matrix(rng, 7, 5), b = random_matrix(rng, 7, 5);
  CHECK(o2p(a, b) == o2p_oracle(a, b));
  Eigen::MatrixXd a2(14, 5), b2(14, 5);
  a2 << a, a;
  b2 << b, b;
  CHECK(o2p(a2, b2) == o2p(a, b));
  CHECK(error_code_of([] { o2p(Eigen::MatrixXd(0, 3), Eigen::MatrixXd(0, 3)); }) == ErrorCode::empty_frame);
  CHECK(error_code_of([&] { o2p(a, random_matrix(rng, 6, 5)); }) == ErrorCode::parameter);
}

TEST_CASE("power-Euclidean analytic cases") {
  Eigen::Matrix2d d;
  d << 4, 0, 0, 1;
  const Eigen::MatrixXd r = power_euclidean(d, 0.5);
  CHECK((r - Eigen::Matrix2d(Eigen::Vector2d(2, 1).asDiagonal())).norm() < 1e-9);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(6, 6);
  for (double alpha : {0.25, 0.5, 2.0}) CHECK((power_euclidean(id, alpha) - id).norm() < 1e-12);
}

TEST_CASE("power-Euclidean: alpha = 1 reconstructs; singular values agree with Jacobi SVD") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = random_matrix(rng, 9, 9);
    CHECK((power_euclidean(m, 1.0) - m).norm() / m.norm() < 1e-6);
    // Independent route: singular values of the output are λ^α.
    const Eigen::MatrixXd out = power_euclidean(m, 0.5);
    Eigen::JacobiSVD<Eigen::MatrixXd> in_svd(m), out_svd(out);
    for (Eigen::Index k = 0; k < 9; ++k) {
      CHECK(out_svd.singularValues()[k] == doctest::Approx(std::sqrt(in_svd.singularValues()[k])).epsilon(1e-9));
    }
  }
}

TEST_CASE("power-Euclidean floors tiny singular values and rejects non-finite input") {
  Eigen::Matrix2d m;
  m << 1, 0, 0, 1e-14;
  const Eigen::MatrixXd r = power_euclidean(m, 0.5);
  CHECK(r(1, 1) == 0.0);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK(error_code_of([&] { power_euclidean(m, 0.5); }) == ErrorCode::numerical);
}

TEST_CASE("finalize: row-major, unit norm, scale invariant") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  const auto g = finalize(id);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(g.values == Eigen::Vector4d(s, 0, 0, s));
  Eigen::Matrix2d m;
  m << 1, 2, 3, 4;
  const auto r = finalize(m);
  CHECK(r.values[1] / r.values[2] == doctest::Approx(2.0 / 3.0));
  CHECK(finalize(3.0 * m).values.isApprox(r.values, 1e-15));
  std::mt19937_64 rng(3);
  CHECK(finalize(random_matrix(rng, 8, 8)).values.norm() == doctest::Approx(1.0));
  CHECK(error_code_of([] { finalize(Eigen::MatrixXd::Zero(3, 3)); }) == ErrorCode::degenerate);
}

TEST_CASE("descriptor files round-trip and reject corruption") {
  test::TempDir dir("desc");
  std::mt19937_64 rng(4);
  std::vector<GlobalDescriptor> gs(3);
  for (auto& g : gs) g = finalize(random_matrix(rng, 4, 4));
  write_descriptor_file(dir / "d.bin", 4, gs);
  CHECK(std::filesystem::file_size(dir / "d.bin") == 24 + 3 * 16 * 8);
  const auto back = read_descriptor_file(dir / "d.bin");
  CHECK(back.d == 4);
  REQUIRE(back.descriptors.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back.descriptors[i].values == gs[i].values);

  std::filesystem::resize_file(dir / "d.bin", 24 + 2 * 16 * 8 + 5);
  CHECK(error_code_of([&] { read_descriptor_file(dir / "d.bin"); }) == ErrorCode::format);
  {
    std::ofstream out(dir / "bad.bin", std::ios::binary);
    out << "NOTLOCUS" << std::string(16, '\0');
  }
  CHECK(error_code_of([&] { read_descriptor_file(dir / "bad.bin"); }) == ErrorCode::format);
  CHECK(error_code_of([&] { read_descriptor_file(dir / "none.bin"); }) == ErrorCode::io);
}

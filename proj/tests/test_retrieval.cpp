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

#include "locus/retrieval.hpp"
#include "support.hpp"

using namespace locus;
using test::error_code_of;

namespace {

GlobalDescriptor unit(std::mt19937_64& rng, Eigen::Index n = 16) {
  std::normal_distribution<double> d(0.0, 1.0);
  GlobalDescriptor g;
  g.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) g.values[i] = d(rng);
  g.values.normalize();
  return g;
}

}  // namespace

TEST_CASE("exclusion window gates candidates") {
  std::mt19937_64 rng(1);
  const auto g = unit(rng);
  Database db;
  db.insert({g, 0.0, Vec3::Zero(), 0});
  auto r = db.query(g, 40.0, 0.1);
  REQUIRE(r.matched_index);
  CHECK(*r.matched_index == 0);
  CHECK(*r.distance == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.positive);
  r = db.query(g, 20.0, 0.1);
  CHECK_FALSE(r.matched_index);
  CHECK_FALSE(r.positive);
  // Exactly 30 s old is eligible.
  CHECK(db.query(g, 30.0, 0.1).matched_index);
  CHECK(db.eligible_count(29.999) == 0);
  // An entry is never its own candidate.
  CHECK_FALSE(db.query(g, 0.0, 0.1).matched_index);
}

TEST_CASE("top-1 equals a linear-scan argmin") {
  std::mt19937_64 rng(2);
  Database db;
  std::vector<GlobalDescriptor> all;
  for (std::size_t i = 0; i < 100; ++i) {
    all.push_back(unit(rng));
    db.insert({all.back(), static_cast<double>(i), Vec3::Zero(), i});
  }
  CHECK(db.size() == 100);
  for (int q = 0; q < 20; ++q) {
    const auto g = unit(rng);
    const double t = 150.0;  // entries 0..120 eligible
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t i = 0; i <= 99; ++i) {
      if (static_cast<double>(i) > t - 30.0) break;
      const double d = 1.0 - all[i].values.dot(g.values);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    const auto r = db.query(g, t, 0.5);
    CHECK(*r.matched_index == best);
    CHECK(*r.distance == doctest::Approx(best_d).epsilon(1e-12));
    CHECK(r.positive == (*r.distance < 0.5));
  }
}

TEST_CASE("ties go to the earlier frame; threshold is strict") {
  std::mt19937_64 rng(3);
  const auto g = unit(rng);
  Database db;
  db.insert({g, 0.0, Vec3::Zero(), 7});
  db.insert({g, 1.0, Vec3::Zero(), 9});
  const auto r = db.query(g, 100.0, *db.query(g, 100.0, 1.0).distance);
  CHECK(*r.matched_index == 7);
  CHECK_FALSE(r.positive);
}

TEST_CASE("insertion order and cosine distance range") {
  std::mt19937_64 rng(4);
  Database db;
  db.insert({unit(rng), 1.0, Vec3::Zero(), 0});
  db.insert({unit(rng), 2.0, Vec3::Zero(), 1});
  db.insert({unit(rng), 2.0, Vec3::Zero(), 2});
  CHECK(db.size() == 3);
  CHECK(error_code_of([&] { db.insert({unit(rng), 1.5, Vec3::Zero(), 3}); }) == ErrorCode::ordering);
  const auto a = unit(rng);
  GlobalDescriptor neg{-a.values};
  CHECK(cosine_distance(a, neg) == doctest::Approx(2.0));
  CHECK(cosine_distance(a, a) >= 0.0);
}

TEST_CASE("database save/load round trip") {
  test::TempDir dir("db");
  std::mt19937_64 rng(5);
  Database db;
  for (std::size_t i = 0; i < 4; ++i) db.insert({unit(rng), 0.1 * i, Vec3(i, -1.0 / 3.0, 2), 10 + i});
  db.save(dir / "d.bin", dir / "i.txt");
  const Database back = Database::load(dir / "d.bin", dir / "i.txt");
  REQUIRE(back.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& a = db.entries()[i];
    const auto& b = back.entries()[i];
    CHECK(a.descriptor.values == b.descriptor.values);
    CHECK(a.timestamp == b.timestamp);
    CHECK(a.position == b.position);
    CHECK(a.frame_index == b.frame_index);
  }
  CHECK(back.find(12) != nullptr);
  CHECK(back.find(3) == nullptr);
  CHECK(error_code_of([&] { Database::load(dir / "d.bin", dir / "nope.txt"); }) == ErrorCode::io);
}

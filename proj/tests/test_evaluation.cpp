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

#include <cmath>
#include <fstream>
#include <numbers>

#include "locus/evaluation.hpp"
#include "support.hpp"

using namespace locus;
using test::error_code_of;

namespace {

QueryRecord rec(std::optional<double> distance, double separation, bool revisit) {
  QueryRecord r;
  r.distance = distance;
  if (distance) {
    r.matched_index = 0;
    r.match_separation = separation;
  }
  r.revisit_exists = revisit;
  return r;
}

}  // namespace

TEST_CASE("query labels") {
  const EvaluationConfig cfg;
  CHECK(classify(true, 1.0, true, cfg) == QueryLabel::true_positive);
  CHECK(classify(true, 25.0, true, cfg) == QueryLabel::false_positive);
  CHECK(classify(true, 10.0, true, cfg) == QueryLabel::ignored);
  CHECK(classify(true, 3.0, true, cfg) == QueryLabel::ignored);
  CHECK(classify(true, 20.0, false, cfg) == QueryLabel::ignored);
  CHECK(classify(false, 1.0, true, cfg) == QueryLabel::false_negative);
  CHECK(classify(false, std::nullopt, false, cfg) == QueryLabel::true_negative);
}

TEST_CASE("revisits are searched in the eligible database only") {
  Database db;
  GlobalDescriptor g;
  g.values = Eigen::VectorXd::Ones(4).normalized();
  db.insert({g, 0.0, Vec3(0, 0, 0), 0});
  db.insert({g, 50.0, Vec3(100, 0, 0), 1});
  const EvaluationConfig cfg;
  CHECK(revisit_exists(db, 60.0, Vec3(1, 1, 0), cfg));
  CHECK_FALSE(revisit_exists(db, 60.0, Vec3(100, 1, 0), cfg));
  CHECK_FALSE(revisit_exists(db, 20.0, Vec3(1, 1, 0), cfg));
  const auto r = db.query(g, 60.0, 0.5);
  CHECK(label_query(r, Vec3(1, 1, 0), db, cfg) == QueryLabel::true_positive);
  CHECK(label_query(r, Vec3(30, 0, 0), db, cfg) == QueryLabel::false_positive);
}

TEST_CASE("scripted 10-query table matches the hand sweep") {
  // Distances strictly increasing; see the worked table in the comments.
  std::vector<QueryRecord> q{
      rec(0.10, 1.0, true),    // TP
      rec(0.20, 2.0, true),    // TP
      rec(0.25, 50.0, false),  // FP
      rec(0.30, 0.5, true),    // TP
      rec(0.40, 10.0, true),   // ignored when positive, FN otherwise
      rec(0.50, 30.0, true),   // FP when positive, FN otherwise
      rec(0.60, 1.0, true),    // TP
      rec(0.70, 40.0, false),  // FP
      rec(std::nullopt, 0.0, false),  // TN
      rec(0.80, 2.0, true),    // TP
  };
  const EvalReport r = sweep(q, EvaluationConfig{});
  CHECK(r.query_count == 10);
  CHECK(r.revisit_count == 7);
  // tau above 0.8: TP 5, FP 3, FN 0 → P 5/8, R 1, F1 10/13.
  CHECK(r.f1_max == doctest::Approx(10.0 / 13.0).epsilon(1e-15));
  CHECK(r.tau_f1_max == std::nextafter(0.8, 1.0));
  CHECK(r.counts_at_f1_max.tp == 5);
  CHECK(r.counts_at_f1_max.fp == 3);
  CHECK(r.counts_at_f1_max.tn == 1);
  CHECK(r.counts_at_f1_max.ignored == 1);
  // Strictest positive threshold admits only query 0 → P_R0 = 1.
  CHECK(r.p_r0 == 1.0);
  // Precision stays 1 up to tau just above 0.2 → recall 2/7.
  CHECK(r.r_p100 == doctest::Approx(2.0 / 7.0).epsilon(1e-15));
  CHECK(r.ep == doctest::Approx(9.0 / 14.0).epsilon(1e-15));
  REQUIRE(r.pr.size() == 10);
  CHECK(r.pr[0].tau == 0.0);
  CHECK(r.pr[0].precision == 1.0);
  CHECK(r.pr[0].recall == 0.0);
  CHECK(r.pr[4].precision == doctest::Approx(0.75));
  CHECK(r.pr[4].recall == doctest::Approx(3.0 / 7.0));
  CHECK(r.pr[5].recall == doctest::Approx(0.5));
  for (std::size_t k = 1; k < r.pr.size(); ++k) CHECK(r.pr[k].tau > r.pr[k - 1].tau);
  for (const auto& p : r.pr) {
    const double f1 = p.precision + p.recall > 0 ? 2 * p.precision * p.recall / (p.precision + p.recall) : 0.0;
    CHECK(r.f1_max >= f1);
  }
  // Decision map at the R_P100 threshold.
  REQUIRE(r.decisions.size() == 10);
  CHECK(r.decisions[0].label == QueryLabel::true_positive);
  CHECK(r.decisions[2].label == QueryLabel::true_negative);
  CHECK(r.decisions[3].label == QueryLabel::false_negative);
}

TEST_CASE("perfect separability gives F1max = EP = 1") {
  std::vector<QueryRecord> q;
  for (int i = 0; i < 5; ++i) q.push_back(rec(0.1 + 0.01 * i, 1.0, true));
  for (int i = 0; i < 5; ++i) q.push_back(rec(0.5 + 0.01 * i, 100.0, false));
  const auto r = sweep(q, EvaluationConfig{});
  CHECK(r.f1_max == 1.0);
  CHECK(r.ep == 1.0);
}

TEST_CASE("EP from P_R0 = 1 and R_P100 = 0.8 is 0.9") {
  // Five revisits: four separable TPs, then an FP, then the fifth TP.
  std::vector<QueryRecord> q{rec(0.1, 1, true), rec(0.2, 1, true), rec(0.3, 1, true),
                             rec(0.4, 1, true), rec(0.5, 50, false), rec(0.6, 1, true)};
  const auto r = sweep(q, EvaluationConfig{});
  CHECK(r.p_r0 == 1.0);
  CHECK(r.r_p100 == doctest::Approx(0.8));
  CHECK(r.ep == doctest::Approx(0.9));
}

TEST_CASE("no revisits is rejected") {
  std::vector<QueryRecord> q{rec(0.1, 50, false), rec(std::nullopt, 0, false)};
  CHECK(error_code_of([&] { sweep(q, EvaluationConfig{}); }) == ErrorCode::no_revisits);
}

TEST_CASE("rotate_frame") {
  PointCloudFrame f;
  f.points = {{1, 0, 0}, {0.3, -2, 5}};
  CHECK(rotate_frame(f, 0.0).points == f.points);
  const auto q = rotate_frame(f, std::numbers::pi / 2);
  CHECK((q.points[0] - Vec3(0, 1, 0)).norm() < 1e-12);
  const auto back = rotate_frame(rotate_frame(f, std::numbers::pi), std::numbers::pi);
  for (std::size_t i = 0; i < 2; ++i) CHECK((back.points[i] - f.points[i]).norm() < 1e-9);
}

TEST_CASE("occlude_frame") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(0.0, 2.0 * std::numbers::pi), r(1.0, 30.0);
  PointCloudFrame f;
  for (int i = 0; i < 20000; ++i) {
    const double t = a(rng), d = r(rng);
    f.points.emplace_back(d * std::cos(t), d * std::sin(t), 0.0);
  }
  CHECK(occlude_frame(f, 0.0, 123.0).points == f.points);
  const auto half = occlude_frame(f, 180.0, 77.0);
  CHECK(std::abs(static_cast<double>(half.points.size()) / f.points.size() - 0.5) < 0.02);
  CHECK(occlude_frame(f, 360.0, 10.0).points.empty());
  // Wrap-around sector [350, 10).
  PointCloudFrame g;
  g.points = {{1, 0, 0}, {0, 1, 0}, {std::cos(0.1), -std::sin(0.1), 0}};
  const auto w = occlude_frame(g, 20.0, 350.0);
  REQUIRE(w.points.size() == 1);
  CHECK(w.points[0] == Vec3(0, 1, 0));
  CHECK(error_code_of([&] { occlude_frame(f, 400.0, 0.0); }) == ErrorCode::parameter);
}

TEST_CASE("report and CSV output") {
  test::TempDir dir("eval");
  std::vector<QueryRecord> q{rec(0.1, 1, true), rec(0.5, 50, false)};
  const auto r = sweep(q, EvaluationConfig{});
  CHECK(format_report(r, "x").find("F1max") != std::string::npos);
  write_pr_csv((dir / "pr.csv").string(), r);
  write_decision_csv((dir / "dec.csv").string(), r);
  std::ifstream pr(dir / "pr.csv"), dec(dir / "dec.csv");
  std::string line;
  std::getline(pr, line);
  CHECK(line == "tau,precision,recall");
  std::getline(dec, line);
  CHECK(line == "frame_index,x,y,label");
}

TEST_CASE("evaluation config validation") {
  EvaluationConfig c;
  c.false_positive_radius = 2.0;
  CHECK(error_code_of([&] { validate(c); }) == ErrorCode::parameter);
}

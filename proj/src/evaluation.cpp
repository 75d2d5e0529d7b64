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

#include "locus/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "locus/error.hpp"

namespace locus {

void validate(const EvaluationConfig& c) {
  if (!(c.true_positive_radius > 0.0) || !(c.false_positive_radius >= c.true_positive_radius)) {
    throw Error(ErrorCode::parameter,
                "evaluation: need 0 < true_positive_radius <= false_positive_radius");
  }
}

const char* to_string(QueryLabel label) {
  switch (label) {
    case QueryLabel::true_positive: return "TP";
    case QueryLabel::false_positive: return "FP";
    case QueryLabel::false_negative: return "FN";
    case QueryLabel::true_negative: return "TN";
    case QueryLabel::ignored: return "ignored";
  }
  return "?";
}

QueryLabel classify(bool positive, std::optional<double> separation, bool revisit,
                    const EvaluationConfig& c) {
  if (positive && separation) {
    if (*separation < c.true_positive_radius) return QueryLabel::true_positive;
    if (*separation > c.false_positive_radius) return QueryLabel::false_positive;
    return QueryLabel::ignored;
  }
  return revisit ? QueryLabel::false_negative : QueryLabel::true_negative;
}

bool revisit_exists(const Database& db, double query_time, const Vec3& position,
                    const EvaluationConfig& c) {
  const std::size_t n = db.eligible_count(query_time);
  for (std::size_t i = 0; i < n; ++i) {
    if ((db.entries()[i].position - position).norm() < c.true_positive_radius) return true;
  }
  return false;
}

QueryRecord make_query_record(const QueryResult& result, std::size_t frame_index,
                              const Vec3& query_position, const Database& db,
                              const EvaluationConfig& c) {
  QueryRecord r;
  r.frame_index = frame_index;
  r.position = query_position;
  r.matched_index = result.matched_index;
  r.distance = result.distance;
  if (result.matched_index) {
    const DatabaseEntry* match = db.find(*result.matched_index);
    if (!match) throw Error(ErrorCode::parameter, "query result names an unknown frame");
    r.match_separation = (match->position - query_position).norm();
  }
  r.revisit_exists = revisit_exists(db, result.query_time, query_position, c);
  return r;
}

QueryLabel label_query(const QueryResult& result, const Vec3& query_position, const Database& db,
                       const EvaluationConfig& c) {
  const QueryRecord r = make_query_record(result, 0, query_position, db, c);
  return classify(result.positive, r.match_separation, r.revisit_exists, c);
}

std::vector<QueryRecord> replay_queries(const Database& db, const EvaluationConfig& c) {
  std::vector<QueryRecord> records;
  records.reserve(db.size());
  const double always = std::numeric_limits<double>::infinity();
  for (const auto& e : db.entries()) {
    const QueryResult res = db.query(e.descriptor, e.timestamp, always);
    records.push_back(make_query_record(res, e.frame_index, e.position, db, c));
  }
  return records;
}

LabelCounts count_labels(std::span<const QueryRecord> records, double tau,
                         const EvaluationConfig& c) {
  LabelCounts n;
  for (const auto& r : records) {
    const bool positive = r.distance && *r.distance < tau;
    switch (classify(positive, r.match_separation, r.revisit_exists, c)) {
      case QueryLabel::true_positive: ++n.tp; break;
      case QueryLabel::false_positive: ++n.fp; break;
      case QueryLabel::false_negative: ++n.fn; break;
      case QueryLabel::true_negative: ++n.tn; break;
      case QueryLabel::ignored: ++n.ignored; break;
    }
  }
  return n;
}

EvalReport sweep(std::span<const QueryRecord> records, const EvaluationConfig& c) {
  EvalReport report;
  report.query_count = records.size();
  report.revisit_count = static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [](const QueryRecord& r) { return r.revisit_exists; }));
  if (report.revisit_count == 0) {
    throw Error(ErrorCode::no_revisits,
                "no query has a revisit within the true-positive radius; recall is undefined "
                "(use a sequence with loops)");
  }

  std::vector<double> distances;
  for (const auto& r : records) {
    if (r.distance) distances.push_back(*r.distance);
  }
  std::sort(distances.begin(), distances.end());
  distances.erase(std::unique(distances.begin(), distances.end()), distances.end());

  std::vector<double> taus{0.0};
  for (double d : distances) {
    const double tau = std::nextafter(d, std::numeric_limits<double>::infinity());
    if (tau > taus.back()) taus.push_back(tau);
  }

  bool have_r0 = false;
  for (double tau : taus) {
    PRPoint pt;
    pt.tau = tau;
    pt.counts = count_labels(records, tau, c);
    const auto& n = pt.counts;
    const std::size_t predicted = n.tp + n.fp;
    pt.precision = predicted > 0 ? static_cast<double>(n.tp) / static_cast<double>(predicted) : 1.0;
    pt.recall = n.tp + n.fn > 0 ? static_cast<double>(n.tp) / static_cast<double>(n.tp + n.fn) : 0.0;
    const double denom = pt.precision + pt.recall;
    const double f1 = denom > 0.0 ? 2.0 * pt.precision * pt.recall / denom : 0.0;
    if (f1 > report.f1_max) {
      report.f1_max = f1;
      report.tau_f1_max = tau;
      report.counts_at_f1_max = n;
    }
    if (!have_r0 && predicted >= 1) {
      report.p_r0 = pt.precision;
      have_r0 = true;
    }
    if (pt.precision == 1.0 && pt.recall >= report.r_p100) {
      report.r_p100 = pt.recall;
      report.tau_r_p100 = tau;
    }
    report.pr.push_back(pt);
  }
  report.ep = (report.p_r0 + report.r_p100) / 2.0;

  for (const auto& r : records) {
    const bool positive = r.distance && *r.distance < report.tau_r_p100;
    report.decisions.push_back({r.frame_index, r.position.x(), r.position.y(),
                                classify(positive, r.match_separation, r.revisit_exists, c)});
  }
  return report;
}

PointCloudFrame rotate_frame(const PointCloudFrame& frame, double angle) {
  PointCloudFrame out = frame;
  const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
  for (auto& p : out.points) p = r * p;
  return out;
}

PointCloudFrame occlude_frame(const PointCloudFrame& frame, double theta_occ_deg,
                              double azimuth_start_deg) {
  if (!(theta_occ_deg >= 0.0 && theta_occ_deg <= 360.0)) {
    throw Error(ErrorCode::parameter, "occlude_frame: theta_occ must lie in [0, 360]");
  }
  PointCloudFrame out;
  out.timestamp = frame.timestamp;
  out.frame_index = frame.frame_index;
  out.points.reserve(frame.points.size());
  for (const auto& p : frame.points) {
    const double az = std::atan2(p.y(), p.x()) * 180.0 / std::numbers::pi;
    double rel = std::fmod(az - azimuth_start_deg, 360.0);
    if (rel < 0.0) rel += 360.0;
    if (!(rel < theta_occ_deg)) out.points.push_back(p);
  }
  return out;
}

std::string format_report(const EvalReport& r, const std::string& title) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "== " << title << " ==\n"
     << "queries         " << r.query_count << "\n"
     << "revisits        " << r.revisit_count << "\n"
     << "F1max           " << r.f1_max << "  (tau " << r.tau_f1_max << ")\n"
     << "EP              " << r.ep << "\n"
     << "P_R0            " << r.p_r0 << "\n"
     << "R_P100          " << r.r_p100 << "  (tau " << r.tau_r_p100 << ")\n"
     << "at F1max        TP " << r.counts_at_f1_max.tp << "  FP " << r.counts_at_f1_max.fp
     << "  FN " << r.counts_at_f1_max.fn << "  TN " << r.counts_at_f1_max.tn << "  ignored "
     << r.counts_at_f1_max.ignored << "\n";
  return os.str();
}

void write_pr_csv(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  out << std::setprecision(17) << "tau,precision,recall\n";
  for (const auto& p : report.pr) out << p.tau << ',' << p.precision << ',' << p.recall << '\n';
}

void write_decision_csv(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  out << std::setprecision(10) << "frame_index,x,y,label\n";
  for (const auto& d : report.decisions) {
    out << d.frame_index << ',' << d.x << ',' << d.y << ',' << to_string(d.label) << '\n';
  }
}

}  // namespace locus

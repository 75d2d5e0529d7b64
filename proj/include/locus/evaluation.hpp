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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locus/retrieval.hpp"
#include "locus/types.hpp"

namespace locus {

struct EvaluationConfig {
  double true_positive_radius = 3.0;
  double false_positive_radius = 20.0;
};

void validate(const EvaluationConfig& config);

enum class QueryLabel { true_positive, false_positive, false_negative, true_negative, ignored };

const char* to_string(QueryLabel label);

/// Positive: match closer than the TP radius → TP, farther than the FP
/// radius → FP, otherwise ignored. Negative: FN if a revisit existed, else TN.
QueryLabel classify(bool positive, std::optional<double> match_separation, bool revisit_exists,
                    const EvaluationConfig& config);

/// Whether any entry eligible at `query_time` lies within the TP radius.
bool revisit_exists(const Database& db, double query_time, const Vec3& position,
                    const EvaluationConfig& config);

QueryLabel label_query(const QueryResult& result, const Vec3& query_position, const Database& db,
                       const EvaluationConfig& config);

/// Threshold-independent summary of one top-1 query.
struct QueryRecord {
  std::size_t frame_index = 0;
  Vec3 position = Vec3::Zero();
  std::optional<std::size_t> matched_index;
  std::optional<double> distance;
  std::optional<double> match_separation;  // meters between query and match
  bool revisit_exists = false;
};

QueryRecord make_query_record(const QueryResult& result, std::size_t frame_index,
                              const Vec3& query_position, const Database& db,
                              const EvaluationConfig& config);

/// Re-runs every entry of a finished database as a query against its own
/// past. Equivalent to querying before each insertion.
std::vector<QueryRecord> replay_queries(const Database& db, const EvaluationConfig& config);

struct LabelCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0, ignored = 0;
};

struct PRPoint {
  double tau = 0.0;
  double precision = 1.0;
  double recall = 0.0;
  LabelCounts counts;
};

struct Decision {
  std::size_t frame_index = 0;
  double x = 0.0, y = 0.0;
  QueryLabel label = QueryLabel::true_negative;
};

struct EvalReport {
  double f1_max = 0.0;
  double ep = 0.0;
  double p_r0 = 0.0;
  double r_p100 = 0.0;
  double tau_f1_max = 0.0;
  double tau_r_p100 = 0.0;
  LabelCounts counts_at_f1_max;
  std::vector<PRPoint> pr;           // taus strictly increasing
  std::vector<Decision> decisions;   // per query, at the R_P100 threshold
  std::size_t query_count = 0;
  std::size_t revisit_count = 0;
};

/// Positive iff distance < tau.
LabelCounts count_labels(std::span<const QueryRecord> records, double tau,
                         const EvaluationConfig& config);

/// Sweeps tau over {0} ∪ {next double above each observed distance}. Throws
/// Error(no_revisits) when no query has a revisit.
EvalReport sweep(std::span<const QueryRecord> records, const EvaluationConfig& config);

/// Rotation about the sensor z axis.
PointCloudFrame rotate_frame(const PointCloudFrame& frame, double angle_rad);

/// Drops points whose azimuth lies in [start, start + theta) mod 360 degrees.
PointCloudFrame occlude_frame(const PointCloudFrame& frame, double theta_occ_deg,
                              double azimuth_start_deg);

/// Plain-text summary of a report.
std::string format_report(const EvalReport& report, const std::string& title);
void write_pr_csv(const std::string& path, const EvalReport& report);
void write_decision_csv(const std::string& path, const EvalReport& report);

}  // namespace locus

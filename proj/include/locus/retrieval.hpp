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
#include <optional>
#include <vector>

#include "locus/aggregation.hpp"
#include "locus/types.hpp"

namespace locus {

struct RetrievalConfig {
  double exclusion_seconds = 30.0;
};

struct DatabaseEntry {
  GlobalDescriptor descriptor;
  double timestamp = 0.0;
  Vec3 position = Vec3::Zero();  // ground truth, evaluation only
  std::size_t frame_index = 0;
};

struct QueryResult {
  std::optional<std::size_t> matched_index;  // frame index of the top-1 entry
  std::optional<double> distance;            // cosine distance, present iff matched
  bool positive = false;
  double query_time = 0.0;
};

/// 1 - <a, b>, clamped to [0, 2].
double cosine_distance(const GlobalDescriptor& a, const GlobalDescriptor& b);

/// Time-ordered descriptor history with exact top-1 search.
class Database {
 public:
  explicit Database(RetrievalConfig config = {}) : config_(config) {}

  /// Appends; timestamps must not decrease (Error(ordering)).
  void insert(DatabaseEntry entry);

  /// Top-1 by cosine distance over entries at least `exclusion_seconds`
  /// older than `query_time`; ties go to the earlier frame. Positive iff the
  /// distance is below `tau`.
  QueryResult query(const GlobalDescriptor& q, double query_time, double tau) const;

  /// Entries eligible as candidates for a query at `query_time`.
  std::size_t eligible_count(double query_time) const;
  const DatabaseEntry* find(std::size_t frame_index) const;

  std::size_t size() const { return entries_.size(); }
  const std::vector<DatabaseEntry>& entries() const { return entries_; }
  const RetrievalConfig& config() const { return config_; }

  /// Descriptor file plus a text sidecar of
  /// "frame_index timestamp x y z" lines.
  void save(const std::filesystem::path& descriptors, const std::filesystem::path& index) const;
  static Database load(const std::filesystem::path& descriptors,
                       const std::filesystem::path& index, RetrievalConfig config = {});

 private:
  RetrievalConfig config_;
  std::vector<DatabaseEntry> entries_;
};

}  // namespace locus

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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "locus/error.hpp"

namespace locus {

double cosine_distance(const GlobalDescriptor& a, const GlobalDescriptor& b) {
  if (a.values.size() != b.values.size()) {
    throw Error(ErrorCode::parameter, "cosine_distance: dimension mismatch");
  }
  return std::clamp(1.0 - a.values.dot(b.values), 0.0, 2.0);
}

void Database::insert(DatabaseEntry entry) {
  if (!entries_.empty()) {
    if (entry.timestamp < entries_.back().timestamp) {
      throw Error(ErrorCode::ordering, "database insert: timestamp " +
                                           std::to_string(entry.timestamp) + " precedes " +
                                           std::to_string(entries_.back().timestamp));
    }
    if (entry.descriptor.size() != entries_.front().descriptor.size()) {
      throw Error(ErrorCode::parameter, "database insert: descriptor dimension mismatch");
    }
  }
  entries_.push_back(std::move(entry));
}

std::size_t Database::eligible_count(double query_time) const {
  // Entries are time-ordered, so the eligible ones form a prefix.
  const double cutoff = query_time - config_.exclusion_seconds;
  auto it = std::upper_bound(entries_.begin(), entries_.end(), cutoff,
                             [](double t, const DatabaseEntry& e) { return t < e.timestamp; });
  return static_cast<std::size_t>(it - entries_.begin());
}

QueryResult Database::query(const GlobalDescriptor& q, double query_time, double tau) const {
  QueryResult result;
  result.query_time = query_time;
  const std::size_t n = eligible_count(query_time);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < n; ++i) {
    // Strict < keeps the earliest entry on ties.
    const double d = cosine_distance(q, entries_[i].descriptor);
    if (d < best) {
      best = d;
      best_index = i;
    }
  }
  if (n > 0) {
    result.matched_index = entries_[best_index].frame_index;
    result.distance = best;
    result.positive = best < tau;
  }
  return result;
}

const DatabaseEntry* Database::find(std::size_t frame_index) const {
  for (const auto& e : entries_) {
    if (e.frame_index == frame_index) return &e;
  }
  return nullptr;
}

void Database::save(const std::filesystem::path& descriptors,
                    const std::filesystem::path& index) const {
  std::vector<GlobalDescriptor> g;
  g.reserve(entries_.size());
  for (const auto& e : entries_) g.push_back(e.descriptor);
  const std::size_t len = entries_.empty() ? 0 : entries_.front().descriptor.size();
  const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(len))));
  write_descriptor_file(descriptors, d, g);

  std::ofstream out(index);
  if (!out) throw Error(ErrorCode::io, "cannot write " + index.string());
  out << std::setprecision(17);
  for (const auto& e : entries_) {
    out << e.frame_index << ' ' << e.timestamp << ' ' << e.position.x() << ' '
        << e.position.y() << ' ' << e.position.z() << '\n';
  }
}

Database Database::load(const std::filesystem::path& descriptors,
                        const std::filesystem::path& index, RetrievalConfig config) {
  DescriptorFile file = read_descriptor_file(descriptors);
  std::ifstream in(index);
  if (!in) throw Error(ErrorCode::io, "cannot open " + index.string());
  Database db(config);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    DatabaseEntry e;
    if (!(ls >> e.frame_index >> e.timestamp >> e.position.x() >> e.position.y() >>
          e.position.z())) {
      throw Error(ErrorCode::format, index.string() + ": malformed line " + std::to_string(row));
    }
    if (row >= file.descriptors.size()) {
      throw Error(ErrorCode::format, index.string() + ": more index rows than descriptors");
    }
    e.descriptor = std::move(file.descriptors[row++]);
    db.insert(std::move(e));
  }
  if (row != file.descriptors.size()) {
    throw Error(ErrorCode::format, index.string() + ": fewer index rows than descriptors");
  }
  return db;
}

}  // namespace locus

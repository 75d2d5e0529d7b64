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

#include "locus/locus_c.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <new>
#include <string>

#include "locus/app.hpp"
#include "locus/config.hpp"
#include "locus/error.hpp"

struct locus_config {
  locus::PipelineConfig value;
};

struct locus_describer {
  locus::Describer describer;
};

struct locus_database {
  locus::Database db;
};

namespace {

thread_local std::string g_last_error;

std::mutex g_log_mutex;
locus_log_fn g_log_fn = nullptr;
void* g_log_user = nullptr;

locus::Logger logger() {
  return [](const std::string& line) {
    std::lock_guard lock(g_log_mutex);
    if (g_log_fn) g_log_fn(line.c_str(), g_log_user);
  };
}

locus_status fail(locus_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, mapping exceptions onto status codes.
template <typename F>
locus_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return LOCUS_OK;
  } catch (const locus::Error& e) {
    return fail(static_cast<locus_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LOCUS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LOCUS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LOCUS_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw locus::Error(locus::ErrorCode::parameter, what);
}

locus::GlobalDescriptor descriptor_from(const double* values, std::size_t length) {
  require(values != nullptr && length > 0, "descriptor must be non-empty");
  locus::GlobalDescriptor g;
  g.values = Eigen::Map<const Eigen::VectorXd>(values, static_cast<Eigen::Index>(length));
  return g;
}

}  // namespace

extern "C" {

const char* locus_version(void) { return locus::kVersion; }

const char* locus_status_string(locus_status status) {
  if (status == LOCUS_OK) return "ok";
  if (status == LOCUS_ERR_INTERNAL) return "internal";
  return locus::to_string(static_cast<locus::ErrorCode>(status));
}

const char* locus_last_error(void) { return g_last_error.c_str(); }

void locus_free_string(char* s) { std::free(s); }

void locus_free_buffer(double* buffer) { std::free(buffer); }

void locus_set_log_callback(locus_log_fn fn, void* user) {
  std::lock_guard lock(g_log_mutex);
  g_log_fn = fn;
  g_log_user = user;
}

locus_status locus_config_create(locus_config** out) {
  return guarded([&] {
    require(out, "null output");
    *out = new locus_config{};
  });
}

locus_status locus_config_load(const char* path, locus_config** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new locus_config{locus::load_config(path)};
  });
}

locus_status locus_config_from_json(const char* json, locus_config** out) {
  return guarded([&] {
    require(json && out, "null argument");
    auto parsed = nlohmann::json::parse(json, nullptr, false);
    if (parsed.is_discarded()) throw locus::Error(locus::ErrorCode::format, "config is not valid JSON");
    *out = new locus_config{locus::config_from_json(parsed)};
  });
}

locus_status locus_config_set(locus_config* config, const char* assignment) {
  return guarded([&] {
    require(config && assignment, "null argument");
    locus::apply_override(config->value, assignment);
  });
}

locus_status locus_config_to_json(const locus_config* config, char** out_json) {
  return guarded([&] {
    require(config && out_json, "null argument");
    *out_json = copy_string(locus::to_json(config->value).dump(2));
  });
}

locus_status locus_config_hash(const locus_config* config, char** out_hex) {
  return guarded([&] {
    require(config && out_hex, "null argument");
    *out_hex = copy_string(locus::config_hash(config->value));
  });
}

void locus_config_destroy(locus_config* config) { delete config; }

locus_status locus_run_describe(const locus_config* config) {
  return guarded([&] {
    require(config, "null config");
    locus::cmd_describe(config->value, logger());
  });
}

locus_status locus_run_evaluate(const locus_config* config) {
  return guarded([&] {
    require(config, "null config");
    locus::cmd_evaluate(config->value, logger());
  });
}

locus_status locus_run_robustness(const locus_config* config) {
  return guarded([&] {
    require(config, "null config");
    locus::cmd_robustness(config->value, logger());
  });
}

locus_status locus_run_synth(const locus_config* config) {
  return guarded([&] {
    require(config, "null config");
    locus::cmd_synth(config->value, logger());
  });
}

locus_status locus_describer_create(const locus_config* config, locus_describer** out) {
  return guarded([&] {
    require(config && out, "null argument");
    const auto& c = config->value;
    *out = new locus_describer{locus::Describer(c.describer, locus::make_extractor(c.extractor))};
  });
}

size_t locus_describer_dimension(const locus_describer* describer) {
  return describer ? describer->describer.descriptor_dimension() : 0;
}

locus_status locus_describer_push(locus_describer* describer, const double* xyz, size_t n,
                                  const double pose[12], double timestamp, size_t frame_index,
                                  locus_mode mode, double* out, size_t out_len,
                                  size_t* segments_out) {
  return guarded([&] {
    require(describer && pose && out, "null argument");
    require(xyz || n == 0, "null point buffer");
    require(mode >= LOCUS_MODE_STRUCTURAL && mode <= LOCUS_MODE_SPATIOTEMPORAL, "unknown mode");
    require(out_len == describer->describer.descriptor_dimension(), "output length must equal the descriptor dimension");

    locus::PointCloudFrame frame;
    frame.timestamp = timestamp;
    frame.frame_index = frame_index;
    frame.points.reserve(n);
    for (size_t i = 0; i < n; ++i) frame.points.emplace_back(xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]);

    locus::Pose p;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) p.rotation(r, c) = pose[4 * r + c];
      p.translation[r] = pose[4 * r + 3];
    }
    require(p.is_rigid(1e-6), "pose rotation is not orthonormal");

    const auto result = describer->describer.describe(frame, p);
    if (segments_out) *segments_out = result.segment_count;
    const auto& g = result.descriptor(static_cast<locus::PoolingMode>(mode));
    if (!g) {
      throw locus::Error(locus::ErrorCode::empty_frame,
                         "frame " + std::to_string(frame_index) + " has no segments");
    }
    std::memcpy(out, g->values.data(), out_len * sizeof(double));
  });
}

void locus_describer_reset(locus_describer* describer) {
  if (describer) describer->describer.reset();
}

void locus_describer_destroy(locus_describer* describer) { delete describer; }

locus_status locus_database_create(double exclusion_seconds, locus_database** out) {
  return guarded([&] {
    require(out, "null output");
    require(exclusion_seconds >= 0.0, "exclusion_seconds must be >= 0");
    *out = new locus_database{locus::Database({exclusion_seconds})};
  });
}

locus_status locus_database_insert(locus_database* db, const double* descriptor, size_t length,
                                   double timestamp, const double position[3],
                                   size_t frame_index) {
  return guarded([&] {
    require(db, "null database");
    if (db->db.size() > 0) {
      require(length == static_cast<size_t>(db->db.entries().front().descriptor.size()),
              "descriptor length differs from the database");
    }
    locus::Vec3 pos = locus::Vec3::Zero();
    if (position) pos = locus::Vec3(position[0], position[1], position[2]);
    db->db.insert({descriptor_from(descriptor, length), timestamp, pos, frame_index});
  });
}

locus_status locus_database_query(const locus_database* db, const double* descriptor,
                                  size_t length, double query_time, double tau,
                                  locus_match* out) {
  return guarded([&] {
    require(db && out, "null argument");
    if (db->db.size() > 0) {
      require(length == static_cast<size_t>(db->db.entries().front().descriptor.size()),
              "descriptor length differs from the database");
    }
    const auto r = db->db.query(descriptor_from(descriptor, length), query_time, tau);
    *out = locus_match{};
    out->matched = r.matched_index.has_value();
    if (r.matched_index) {
      out->frame_index = *r.matched_index;
      out->distance = *r.distance;
    }
    out->positive = r.positive;
  });
}

size_t locus_database_size(const locus_database* db) { return db ? db->db.size() : 0; }

locus_status locus_database_save(const locus_database* db, const char* descriptor_path,
                                 const char* index_path) {
  return guarded([&] {
    require(db && descriptor_path && index_path, "null argument");
    db->db.save(descriptor_path, index_path);
  });
}

locus_status locus_database_load(const char* descriptor_path, const char* index_path,
                                 double exclusion_seconds, locus_database** out) {
  return guarded([&] {
    require(descriptor_path && index_path && out, "null argument");
    *out = new locus_database{
        locus::Database::load(descriptor_path, index_path, {exclusion_seconds})};
  });
}

void locus_database_destroy(locus_database* db) { delete db; }

locus_status locus_evaluate_records(const locus_query_record* records, size_t n,
                                    double true_positive_radius, double false_positive_radius,
                                    locus_metrics* out) {
  return guarded([&] {
    require(out && (records || n == 0), "null argument");
    locus::EvaluationConfig cfg{true_positive_radius, false_positive_radius};
    locus::validate(cfg);
    std::vector<locus::QueryRecord> recs(n);
    for (size_t i = 0; i < n; ++i) {
      recs[i].frame_index = i;
      recs[i].revisit_exists = records[i].revisit_exists != 0;
      if (records[i].matched) {
        recs[i].matched_index = 0;
        recs[i].distance = records[i].distance;
        recs[i].match_separation = records[i].match_separation;
      }
    }
    const auto r = locus::sweep(recs, cfg);
    *out = locus_metrics{r.f1_max,     r.ep,         r.p_r0,          r.r_p100,
                         r.tau_f1_max, r.tau_r_p100, r.query_count, r.revisit_count};
  });
}

locus_status locus_read_kitti_frame(const char* path, double** xyz, size_t* n) {
  return guarded([&] {
    require(path && xyz && n, "null argument");
    const auto frame = locus::read_kitti_frame(path);
    auto* buf = static_cast<double*>(std::malloc(std::max<size_t>(1, frame.points.size()) * 3 * sizeof(double)));
    if (!buf) throw std::bad_alloc();
    for (size_t i = 0; i < frame.points.size(); ++i) {
      for (int k = 0; k < 3; ++k) buf[3 * i + k] = frame.points[i][k];
    }
    *xyz = buf;
    *n = frame.points.size();
  });
}

}  // extern "C"

/*
 * Copyright 2026 The Locus Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the Locus place-recognition library.
 *
 * Every fallible call returns a locus_status; on failure the message is
 * available from locus_last_error() on the same thread until the next call.
 * Handles are opaque and owned by the caller (release with *_destroy).
 * Strings and buffers returned by the library are released with
 * locus_free_string / locus_free_buffer.
 */
#ifndef LOCUS_C_H
#define LOCUS_C_H

#include <stddef.h>

#if defined(_WIN32)
#define LOCUS_API __declspec(dllexport)
#else
#define LOCUS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum locus_status {
  LOCUS_OK = 0,
  LOCUS_ERR_IO = 1,
  LOCUS_ERR_FORMAT = 2,
  LOCUS_ERR_PARAMETER = 3,
  LOCUS_ERR_NUMERICAL = 4,
  LOCUS_ERR_DEGENERATE = 5,
  LOCUS_ERR_ORDERING = 6,
  LOCUS_ERR_EMPTY_FRAME = 7,
  LOCUS_ERR_NO_REVISITS = 8,
  LOCUS_ERR_INTERNAL = 100
} locus_status;

/* Pooling modes, i.e. the choice of second feature in second-order pooling. */
typedef enum locus_mode {
  LOCUS_MODE_STRUCTURAL = 0,
  LOCUS_MODE_SPATIAL = 1,
  LOCUS_MODE_TEMPORAL = 2,
  LOCUS_MODE_SPATIOTEMPORAL = 3
} locus_mode;

LOCUS_API const char* locus_version(void);
LOCUS_API const char* locus_status_string(locus_status status);
LOCUS_API const char* locus_last_error(void);
LOCUS_API void locus_free_string(char* s);
LOCUS_API void locus_free_buffer(double* buffer);

/* Progress lines from the run commands. NULL disables logging. */
typedef void (*locus_log_fn)(const char* line, void* user);
LOCUS_API void locus_set_log_callback(locus_log_fn fn, void* user);

/* ---- configuration ---------------------------------------------------- */

typedef struct locus_config locus_config;

LOCUS_API locus_status locus_config_create(locus_config** out);
LOCUS_API locus_status locus_config_load(const char* path, locus_config** out);
LOCUS_API locus_status locus_config_from_json(const char* json, locus_config** out);
/* "section.key=value"; the value is JSON or a bare string. */
LOCUS_API locus_status locus_config_set(locus_config* config, const char* assignment);
LOCUS_API locus_status locus_config_to_json(const locus_config* config, char** out_json);
LOCUS_API locus_status locus_config_hash(const locus_config* config, char** out_hex);
LOCUS_API void locus_config_destroy(locus_config* config);

/* ---- commands (write into the configured output directory) ------------ */

LOCUS_API locus_status locus_run_describe(const locus_config* config);
LOCUS_API locus_status locus_run_evaluate(const locus_config* config);
LOCUS_API locus_status locus_run_robustness(const locus_config* config);
LOCUS_API locus_status locus_run_synth(const locus_config* config);

/* ---- streaming description -------------------------------------------- */

typedef struct locus_describer locus_describer;

LOCUS_API locus_status locus_describer_create(const locus_config* config, locus_describer** out);
/* Descriptor length (d*d). */
LOCUS_API size_t locus_describer_dimension(const locus_describer* describer);
/* Consumes one frame: `xyz` holds n points as x,y,z triples in the sensor
 * frame, `pose` the 3x4 row-major sensor-to-world transform. Frames must
 * arrive in increasing `frame_index`. Writes the `mode` descriptor into
 * `out` (length `out_len` = dimension). A frame without segments returns
 * LOCUS_ERR_EMPTY_FRAME but still advances the temporal window. */
LOCUS_API locus_status locus_describer_push(locus_describer* describer, const double* xyz,
                                            size_t n, const double pose[12], double timestamp,
                                            size_t frame_index, locus_mode mode, double* out,
                                            size_t out_len, size_t* segments_out);
LOCUS_API void locus_describer_reset(locus_describer* describer);
LOCUS_API void locus_describer_destroy(locus_describer* describer);

/* ---- descriptor database ---------------------------------------------- */

typedef struct locus_database locus_database;

typedef struct locus_match {
  int matched;           /* 0 when no entry is old enough */
  size_t frame_index;    /* of the top-1 entry */
  double distance;       /* cosine distance */
  int positive;          /* distance < tau */
} locus_match;

LOCUS_API locus_status locus_database_create(double exclusion_seconds, locus_database** out);
LOCUS_API locus_status locus_database_insert(locus_database* db, const double* descriptor,
                                             size_t length, double timestamp,
                                             const double position[3], size_t frame_index);
LOCUS_API locus_status locus_database_query(const locus_database* db, const double* descriptor,
                                            size_t length, double query_time, double tau,
                                            locus_match* out);
LOCUS_API size_t locus_database_size(const locus_database* db);
LOCUS_API locus_status locus_database_save(const locus_database* db, const char* descriptor_path,
                                           const char* index_path);
LOCUS_API locus_status locus_database_load(const char* descriptor_path, const char* index_path,
                                           double exclusion_seconds, locus_database** out);
LOCUS_API void locus_database_destroy(locus_database* db);

/* ---- metrics ---------------------------------------------------------- */

typedef struct locus_query_record {
  int matched;
  double distance;          /* valid when matched */
  double match_separation;  /* meters between query and match; valid when matched */
  int revisit_exists;       /* a true revisit was available */
} locus_query_record;

typedef struct locus_metrics {
  double f1_max;
  double ep;
  double p_r0;
  double r_p100;
  double tau_f1_max;
  double tau_r_p100;
  size_t query_count;
  size_t revisit_count;
} locus_metrics;

LOCUS_API locus_status locus_evaluate_records(const locus_query_record* records, size_t n,
                                              double true_positive_radius,
                                              double false_positive_radius, locus_metrics* out);

/* ---- KITTI ------------------------------------------------------------ */

/* Reads a velodyne .bin; *xyz receives 3*n doubles (free with
 * locus_free_buffer). Intensity is dropped. */
LOCUS_API locus_status locus_read_kitti_frame(const char* path, double** xyz, size_t* n);

#ifdef __cplusplus
}
#endif

#endif /* LOCUS_C_H */

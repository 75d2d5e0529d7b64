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

#include "locus/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "locus/error.hpp"

namespace locus {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorCode::parameter, "config: " + what);
}

// Recursively overlays `patch` onto `base`; every key of `patch` must exist
// in `base`. Arrays and scalars replace wholesale.
void overlay(json& base, const json& patch, const std::string& where) {
  if (!patch.is_object()) fail(where.empty() ? "top level must be an object" : where + " must be an object");
  for (const auto& [key, value] : patch.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!base.contains(key)) fail("unknown key '" + path + "'");
    json& slot = base[key];
    if (slot.is_object()) {
      overlay(slot, value, path);
    } else {
      slot = value;
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  try {
    j.at(key).get_to(out);
  } catch (const json::exception&) {
    fail("'" + where + "." + key + "' has the wrong type");
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

BenchmarkConfig PipelineConfig::benchmark() const {
  BenchmarkConfig b;
  b.describer = describer;
  b.extractor = extractor;
  b.retrieval = retrieval;
  b.evaluation = evaluation;
  b.modes = modes;
  b.workers = workers;
  return b;
}

json to_json(const PipelineConfig& c) {
  const auto& s = c.describer.segmentation;
  const auto& p = c.describer.pooling;
  json modes = json::array();
  for (auto m : c.modes) modes.push_back(to_string(m));
  json synthetic;
  to_json(synthetic, c.dataset.synthetic);
  return json{
      {"dataset",
       {{"kind", c.dataset.kind},
        {"seed", c.dataset.seed},
        {"frame_limit", c.dataset.frame_limit},
        {"synthetic", synthetic},
        {"kitti",
         {{"velodyne_dir", c.dataset.kitti.velodyne_dir.string()},
          {"poses", c.dataset.kitti.poses.string()},
          {"times", c.dataset.kitti.times.string()},
          {"calib", c.dataset.kitti.calib.string()}}}}},
      {"segmentation",
       {{"cluster_distance", s.cluster_distance},
        {"min_points", s.min_points},
        {"max_points", s.max_points},
        {"max_range", s.max_range},
        {"ransac_iterations", s.ransac_iterations},
        {"ransac_threshold", s.ransac_threshold},
        {"normal_cone_deg", s.normal_cone_deg},
        {"min_ground_fraction", s.min_ground_fraction},
        {"fallback_percentile", s.fallback_percentile},
        {"ransac_seed", s.ransac_seed}}},
      {"features", {{"extractor", c.extractor}}},
      {"pooling",
       {{"k_s", p.k_s},
        {"k_t", p.k_t},
        {"beta", p.beta},
        {"radius_r", p.radius_r},
        {"knn_feature_k", p.knn_feature_k}}},
      {"aggregation", {{"alpha", c.describer.alpha}}},
      {"retrieval", {{"exclusion_seconds", c.retrieval.exclusion_seconds}}},
      {"evaluation",
       {{"true_positive_radius", c.evaluation.true_positive_radius},
        {"false_positive_radius", c.evaluation.false_positive_radius},
        {"modes", modes}}},
      {"robustness",
       {{"occlusion_angles", c.robustness.occlusion_angles},
        {"rotation", c.robustness.rotation},
        {"seed", c.robustness.seed}}},
      {"workers", c.workers},
      {"output_dir", c.output_dir},
      {"database_dir", c.database_dir}};
}

PipelineConfig config_from_json(const json& patch) {
  json j = to_json(PipelineConfig{});
  overlay(j, patch, "");

  PipelineConfig c;
  const json& d = j["dataset"];
  read(d, "kind", c.dataset.kind, "dataset");
  read(d, "seed", c.dataset.seed, "dataset");
  read(d, "frame_limit", c.dataset.frame_limit, "dataset");
  from_json(d["synthetic"], c.dataset.synthetic);
  std::string path;
  read(d["kitti"], "velodyne_dir", path, "dataset.kitti");
  c.dataset.kitti.velodyne_dir = path;
  read(d["kitti"], "poses", path, "dataset.kitti");
  c.dataset.kitti.poses = path;
  read(d["kitti"], "times", path, "dataset.kitti");
  c.dataset.kitti.times = path;
  read(d["kitti"], "calib", path, "dataset.kitti");
  c.dataset.kitti.calib = path;

  auto& s = c.describer.segmentation;
  const json& sj = j["segmentation"];
  read(sj, "cluster_distance", s.cluster_distance, "segmentation");
  read(sj, "min_points", s.min_points, "segmentation");
  read(sj, "max_points", s.max_points, "segmentation");
  read(sj, "max_range", s.max_range, "segmentation");
  read(sj, "ransac_iterations", s.ransac_iterations, "segmentation");
  read(sj, "ransac_threshold", s.ransac_threshold, "segmentation");
  read(sj, "normal_cone_deg", s.normal_cone_deg, "segmentation");
  read(sj, "min_ground_fraction", s.min_ground_fraction, "segmentation");
  read(sj, "fallback_percentile", s.fallback_percentile, "segmentation");
  read(sj, "ransac_seed", s.ransac_seed, "segmentation");

  read(j["features"], "extractor", c.extractor, "features");

  auto& p = c.describer.pooling;
  const json& pj = j["pooling"];
  read(pj, "k_s", p.k_s, "pooling");
  read(pj, "k_t", p.k_t, "pooling");
  read(pj, "beta", p.beta, "pooling");
  read(pj, "radius_r", p.radius_r, "pooling");
  read(pj, "knn_feature_k", p.knn_feature_k, "pooling");

  read(j["aggregation"], "alpha", c.describer.alpha, "aggregation");
  read(j["retrieval"], "exclusion_seconds", c.retrieval.exclusion_seconds, "retrieval");

  const json& ej = j["evaluation"];
  read(ej, "true_positive_radius", c.evaluation.true_positive_radius, "evaluation");
  read(ej, "false_positive_radius", c.evaluation.false_positive_radius, "evaluation");
  std::vector<std::string> modes;
  read(ej, "modes", modes, "evaluation");
  c.modes.clear();
  for (const auto& m : modes) c.modes.push_back(pooling_mode_from_string(m));

  const json& rj = j["robustness"];
  read(rj, "occlusion_angles", c.robustness.occlusion_angles, "robustness");
  read(rj, "rotation", c.robustness.rotation, "robustness");
  read(rj, "seed", c.robustness.seed, "robustness");

  read(j, "workers", c.workers, "");
  read(j, "output_dir", c.output_dir, "");
  read(j, "database_dir", c.database_dir, "");
  validate(c);
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, "config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

void validate(const PipelineConfig& c) {
  if (c.dataset.kind == "synthetic") {
    validate(c.dataset.synthetic);
  } else if (c.dataset.kind == "kitti") {
    if (c.dataset.kitti.velodyne_dir.empty() || c.dataset.kitti.poses.empty()) {
      fail("dataset.kitti needs velodyne_dir and poses");
    }
  } else {
    fail("dataset.kind must be 'synthetic' or 'kitti'");
  }
  validate(c.describer);
  make_extractor(c.extractor);
  if (!(c.retrieval.exclusion_seconds >= 0.0) || !std::isfinite(c.retrieval.exclusion_seconds)) {
    fail("retrieval.exclusion_seconds must be finite and >= 0");
  }
  validate(c.evaluation);
  if (c.modes.empty()) fail("evaluation.modes must not be empty");
  for (double a : c.robustness.occlusion_angles) {
    if (!(a >= 0.0 && a <= 360.0)) fail("robustness.occlusion_angles must lie in [0, 360]");
  }
  if (c.workers < 1 || c.workers > 256) fail("workers must lie in [1, 256]");
  if (c.output_dir.empty()) fail("output_dir must not be empty");
}

void apply_override(PipelineConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) fail("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json patch = json::object();
  json* slot = &patch;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) fail("override key '" + key + "' is malformed");
    if (dot == std::string::npos) {
      (*slot)[part] = value;
      break;
    }
    slot = &(*slot)[part];
    start = dot + 1;
  }
  json merged = to_json(config);
  overlay(merged, patch, "");
  config = config_from_json(merged);
}

std::string config_hash(const PipelineConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(to_json(config).dump())));
  return buf;
}

std::unique_ptr<FrameSource> open_dataset(const PipelineConfig& config) {
  const auto& d = config.dataset;
  if (d.kind == "kitti") {
    KittiPaths paths = d.kitti;
    paths.frame_limit = d.frame_limit;
    return std::make_unique<KittiSequence>(paths);
  }
  SyntheticSpec spec = d.synthetic;
  if (d.frame_limit > 0) {
    // Same trajectory and world, cut short.
    spec.frame_count = std::min(d.frame_limit, SyntheticScene(spec, d.seed).size());
  }
  return std::make_unique<SyntheticScene>(spec, d.seed);
}

}  // namespace locus

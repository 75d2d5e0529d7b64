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

#include "locus/app.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "locus/error.hpp"

namespace locus {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void say(const Logger& log, const std::string& line) {
  if (log) log(line);
}

fs::path prepare_output(const PipelineConfig& config) {
  const fs::path dir = config.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::io, "write failed: " + path.string());
}

json base_manifest(const PipelineConfig& config, const char* command) {
  return json{{"command", command},
              {"version", kVersion},
              {"config", to_json(config)},
              {"config_hash", config_hash(config)},
              {"seeds",
               {{"dataset", config.dataset.seed},
                {"ransac", config.describer.segmentation.ransac_seed},
                {"robustness", config.robustness.seed}}}};
}

std::string descriptor_name(PoolingMode m) { return std::string("descriptors_") + to_string(m) + ".bin"; }

void log_skipped(const Logger& log, const std::vector<std::size_t>& skipped) {
  for (auto i : skipped) say(log, "frame " + std::to_string(i) + ": no segments, skipped");
}

}  // namespace

DescribeSummary cmd_describe(const PipelineConfig& config, const Logger& log) {
  validate(config);
  const fs::path dir = prepare_output(config);
  const auto source = open_dataset(config);
  Describer describer(config.describer, make_extractor(config.extractor), config.modes);
  say(log, "describing " + std::to_string(source->size()) + " frames");
  const auto frames = describe_source(*source, describer, config.workers);

  DescribeSummary summary;
  summary.frames = frames.size();
  summary.dimension = describer.descriptor_dimension();
  std::ostringstream timing;
  timing << std::fixed << std::setprecision(3)
         << "frame_index,segments,segmentation_ms,features_ms,pooling_ms,aggregation_ms,total_ms\n";
  for (const auto& f : frames) {
    if (f.empty()) summary.skipped_frames.push_back(f.frame_index);
    const auto& t = f.timing;
    timing << f.frame_index << ',' << f.segment_count << ',' << t.segmentation_ms << ','
           << t.features_ms << ',' << t.pooling_ms << ',' << t.aggregation_ms << ','
           << t.segmentation_ms + t.features_ms + t.pooling_ms + t.aggregation_ms << '\n';
  }
  log_skipped(log, summary.skipped_frames);

  for (auto mode : config.modes) {
    Database db(config.retrieval);
    for (const auto& f : frames) {
      if (const auto& g = f.descriptor(mode)) {
        db.insert({*g, f.timestamp, source->position(f.frame_index), f.frame_index});
      }
    }
    db.save(dir / descriptor_name(mode), dir / "index.txt");
  }
  write_text(dir / "timing.csv", timing.str());

  json manifest = base_manifest(config, "describe");
  manifest["frames"] = summary.frames;
  manifest["descriptor_dimension"] = summary.dimension;
  manifest["skipped_frames"] = summary.skipped_frames;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  say(log, "wrote " + std::to_string(summary.frames - summary.skipped_frames.size()) +
               " descriptors per mode to " + dir.string());
  return summary;
}

std::array<std::optional<EvalReport>, 4> cmd_evaluate(const PipelineConfig& config,
                                                      const Logger& log) {
  validate(config);
  std::array<std::optional<EvalReport>, 4> reports;
  std::vector<std::size_t> skipped;

  if (!config.database_dir.empty()) {
    const fs::path db_dir = config.database_dir;
    if (!fs::is_directory(db_dir)) {
      throw Error(ErrorCode::io, "database directory " + db_dir.string() + " does not exist");
    }
    for (auto mode : config.modes) {
      const fs::path desc = db_dir / descriptor_name(mode);
      if (!fs::exists(desc)) {
        throw Error(ErrorCode::io, "database is missing " + desc.string() +
                                       " (run describe with this mode first)");
      }
      const Database db = Database::load(desc, db_dir / "index.txt", config.retrieval);
      say(log, std::string(to_string(mode)) + ": " + std::to_string(db.size()) +
                   " descriptors loaded");
      const auto records = replay_queries(db, config.evaluation);
      reports[static_cast<std::size_t>(mode)] = sweep(records, config.evaluation);
    }
  } else {
    const auto source = open_dataset(config);
    say(log, "describing " + std::to_string(source->size()) + " frames");
    BenchmarkResult result = run_benchmark(*source, config.benchmark());
    skipped = result.skipped_frames;
    log_skipped(log, skipped);
    reports = std::move(result.reports);
  }

  const fs::path dir = prepare_output(config);
  std::string all;
  json summary = json::object();
  for (auto mode : config.modes) {
    const auto& r = *reports[static_cast<std::size_t>(mode)];
    const std::string name = to_string(mode);
    const std::string text = format_report(r, name);
    all += text + "\n";
    write_text(dir / ("report_" + name + ".txt"), text);
    write_pr_csv((dir / ("pr_" + name + ".csv")).string(), r);
    write_decision_csv((dir / ("decisions_" + name + ".csv")).string(), r);
    summary[name] = {{"f1_max", r.f1_max},     {"ep", r.ep},
                     {"p_r0", r.p_r0},         {"r_p100", r.r_p100},
                     {"queries", r.query_count}, {"revisits", r.revisit_count}};
    say(log, text);
  }
  write_text(dir / "report.txt", all);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  json manifest = base_manifest(config, "evaluate");
  manifest["skipped_frames"] = skipped;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return reports;
}

RobustnessSummary cmd_robustness(const PipelineConfig& config, const Logger& log) {
  validate(config);
  const auto source = open_dataset(config);
  const BenchmarkConfig bench = config.benchmark();
  const auto f1_of = [&](const BenchmarkResult& r) {
    std::array<std::optional<double>, 4> out;
    for (auto m : config.modes) out[static_cast<std::size_t>(m)] = r.report(m).f1_max;
    return out;
  };

  RobustnessSummary s;
  say(log, "baseline");
  s.baseline = f1_of(run_benchmark(*source, bench));
  for (double theta : config.robustness.occlusion_angles) {
    say(log, "occlusion " + std::to_string(theta) + " deg");
    s.occlusion.push_back(
        {theta, f1_of(run_benchmark(*source, bench,
                                    random_occlusion(theta, config.robustness.seed)))});
  }
  if (config.robustness.rotation) {
    say(log, "random rotation");
    s.rotated = f1_of(run_benchmark(*source, bench, random_rotation(config.robustness.seed)));
    double sum = 0.0;
    for (auto m : config.modes) {
      const auto k = static_cast<std::size_t>(m);
      sum += *s.rotated[k] - *s.baseline[k];
    }
    s.rotation_delta = sum / static_cast<double>(config.modes.size());
  }

  const fs::path dir = prepare_output(config);
  std::ostringstream csv, rot, text;
  csv << std::setprecision(17) << "theta_deg";
  rot << std::setprecision(17) << "mode,baseline_f1_max,rotated_f1_max,delta\n";
  text << std::fixed << std::setprecision(4) << "F1max vs occlusion angle\n" << std::setw(10)
       << "theta";
  for (auto m : config.modes) {
    csv << ',' << to_string(m);
    text << std::setw(16) << to_string(m);
  }
  csv << '\n';
  text << '\n' << std::setw(10) << "baseline";
  for (auto m : config.modes) text << std::setw(16) << *s.baseline[static_cast<std::size_t>(m)];
  text << '\n';
  for (const auto& row : s.occlusion) {
    csv << row.theta_deg;
    text << std::setw(10) << std::setprecision(1) << row.theta_deg << std::setprecision(4);
    for (auto m : config.modes) {
      const double v = *row.f1_max[static_cast<std::size_t>(m)];
      csv << ',' << v;
      text << std::setw(16) << v;
    }
    csv << '\n';
    text << '\n';
  }
  if (s.rotation_delta) {
    text << "\nrandom rotation\n";
    for (auto m : config.modes) {
      const auto k = static_cast<std::size_t>(m);
      const double delta = *s.rotated[k] - *s.baseline[k];
      rot << to_string(m) << ',' << *s.baseline[k] << ',' << *s.rotated[k] << ',' << delta << '\n';
      text << std::setw(16) << to_string(m) << "  " << *s.baseline[k] << " -> " << *s.rotated[k]
           << "  (" << std::showpos << delta << std::noshowpos << ")\n";
    }
    text << "mean F1max delta " << std::showpos << *s.rotation_delta << std::noshowpos << '\n';
    write_text(dir / "rotation.csv", rot.str());
  }
  write_text(dir / "occlusion.csv", csv.str());
  write_text(dir / "robustness.txt", text.str());
  write_text(dir / "manifest.json", base_manifest(config, "robustness").dump(2) + "\n");
  say(log, text.str());
  return s;
}

std::size_t cmd_synth(const PipelineConfig& config, const Logger& log) {
  validate(config);
  if (config.dataset.kind != "synthetic") {
    throw Error(ErrorCode::parameter, "synth needs dataset.kind = synthetic");
  }
  const fs::path dir = prepare_output(config);
  fs::create_directories(dir / "velodyne");
  fs::create_directories(dir / "labels");
  SyntheticSpec spec = config.dataset.synthetic;
  if (config.dataset.frame_limit > 0) {
    spec.frame_count = std::min(config.dataset.frame_limit,
                                SyntheticScene(spec, config.dataset.seed).size());
  }
  const SyntheticScene scene(spec, config.dataset.seed);

  std::vector<Pose> poses;
  std::vector<double> times;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%06zu", i);
    const LabeledFrame f = scene.render(i);
    write_kitti_frame(dir / "velodyne" / (std::string(name) + ".bin"), f.frame);
    std::ofstream labels(dir / "labels" / (std::string(name) + ".label"), std::ios::binary);
    for (int label : f.labels) {
      const auto v = static_cast<std::int32_t>(label);
      const auto u = static_cast<std::uint32_t>(v);
      const char bytes[4] = {static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                             static_cast<char>((u >> 16) & 0xff), static_cast<char>(u >> 24)};
      labels.write(bytes, 4);
    }
    if (!labels) throw Error(ErrorCode::io, "cannot write labels for frame " + std::to_string(i));
    poses.push_back(scene.pose(i));
    times.push_back(scene.timestamp(i));
  }
  write_poses(dir / "poses.txt", poses);
  write_times(dir / "times.txt", times);

  json objects = json::array();
  for (const auto& o : scene.objects()) {
    objects.push_back({{"id", o.id},
                       {"type", to_string(o.type)},
                       {"center", {o.center.x(), o.center.y(), o.center.z()}},
                       {"half_extents", {o.half_extents.x(), o.half_extents.y(), o.half_extents.z()}},
                       {"yaw", o.yaw}});
  }
  write_text(dir / "objects.json", objects.dump(2) + "\n");
  json spec_json;
  to_json(spec_json, spec);
  write_text(dir / "spec.json",
             json{{"seed", config.dataset.seed}, {"spec", spec_json}}.dump(2) + "\n");
  say(log, "wrote " + std::to_string(scene.size()) + " frames to " + dir.string());
  return scene.size();
}

}  // namespace locus

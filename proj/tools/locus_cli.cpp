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

// locus: command-line front end over the C API.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "locus/locus_c.h"

namespace {

struct ConfigHandle {
  locus_config* ptr = nullptr;
  ~ConfigHandle() { locus_config_destroy(ptr); }
};

int report_failure(locus_status status, const char* what) {
  std::fprintf(stderr, "locus %s failed [%s]: %s\n", what, locus_status_string(status),
               locus_last_error());
  return static_cast<int>(status) == 0 ? 1 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locus LiDAR place recognition"};
  app.set_version_flag("--version", locus_version());
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
  std::string database;
  std::size_t workers = 0;
  bool quiet = false;
  bool print_config = false;

  app.add_option("-c,--config", config_path, "JSON config file (defaults when omitted)");
  app.add_option("-s,--set", overrides, "Override a config key, e.g. --set pooling.k_t=2")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("-o,--output", output, "Output directory (output_dir)");
  app.add_option("-w,--workers", workers, "Worker threads for frame description")
      ->check(CLI::Range(1, 256));
  app.add_flag("-q,--quiet", quiet, "No progress output");
  app.add_flag("--print-config", print_config, "Print the effective config and exit");

  app.add_subcommand("describe", "Describe every frame and write a descriptor database");
  auto* evaluate = app.add_subcommand("evaluate", "Score retrieval per pooling mode (PR curves, F1max, EP)");
  evaluate->add_option("-d,--database", database, "Directory written by describe (database_dir)");
  app.add_subcommand("robustness", "F1max under scan occlusion and random rotation");
  app.add_subcommand("synth", "Write the configured synthetic sequence in KITTI layout");

  CLI11_PARSE(app, argc, argv);
  if (app.get_subcommands().empty() && !print_config) {
    std::fprintf(stderr, "A subcommand is required\nRun with --help for more information.\n");
    return 106;  // CLI11's RequiredError exit code
  }

  ConfigHandle config;
  locus_status st = config_path.empty() ? locus_config_create(&config.ptr)
                                        : locus_config_load(config_path.c_str(), &config.ptr);
  if (st != LOCUS_OK) return report_failure(st, "config");
  // Flags win over both the file and --set.
  if (!output.empty()) overrides.push_back("output_dir=\"" + output + "\"");
  if (!database.empty()) overrides.push_back("database_dir=\"" + database + "\"");
  if (workers > 0) overrides.push_back("workers=" + std::to_string(workers));
  for (const auto& o : overrides) {
    if ((st = locus_config_set(config.ptr, o.c_str())) != LOCUS_OK) {
      return report_failure(st, "config");
    }
  }

  if (print_config) {
    char* text = nullptr;
    if ((st = locus_config_to_json(config.ptr, &text)) != LOCUS_OK) return report_failure(st, "config");
    std::printf("%s\n", text);
    locus_free_string(text);
    return 0;
  }

  if (!quiet) {
    locus_set_log_callback([](const char* line, void*) { std::fprintf(stderr, "%s\n", line); },
                           nullptr);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (command == "describe") st = locus_run_describe(config.ptr);
  else if (command == "evaluate") st = locus_run_evaluate(config.ptr);
  else if (command == "robustness") st = locus_run_robustness(config.ptr);
  else st = locus_run_synth(config.ptr);
  if (st != LOCUS_OK) return report_failure(st, command.c_str());
  return 0;
}

/*
 Copyright 2026 The atmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "atmpc/config.hpp"
#include "atmpc/episode_io.hpp"
#include "atmpc/error.hpp"
#include "atmpc/harness.hpp"

namespace fs = std::filesystem;
using namespace atmpc;

namespace {

struct RunArgs {
  std::string config;
  int seeds = 0;
  std::string variant;
  std::string out;
  unsigned threads = 0;
};

int cmd_run(const RunArgs& args, bool deterministic) {
  ScenarioConfig cfg = load_config(args.config);
  if (args.seeds > 0) {
    cfg.seeds.resize(static_cast<std::size_t>(args.seeds));
    std::iota(cfg.seeds.begin(), cfg.seeds.end(), std::uint64_t{0});
  }
  if (!args.variant.empty()) cfg.variant = parse_variant(args.variant);
  const std::string out = args.out.empty() ? cfg.output : args.out;
  fs::create_directories(out);

  unsigned threads = args.threads > 0 ? args.threads : std::thread::hardware_concurrency();
  if (deterministic || threads == 0) threads = 1;

  const OfflineDesign design = offline_design(cfg);
  write_text((fs::path(out) / "design.json").string(), design_json(cfg, design));

  const auto logs = run_batch(cfg, design, cfg.seeds, cfg.variant, threads);
  int aborted = 0;
  for (const auto& log : logs) {
    write_text((fs::path(out) / episode_file_name(cfg.variant, log.seed)).string(),
               episode_csv(log));
    write_text((fs::path(out) / timing_file_name(cfg.variant, log.seed)).string(),
               timing_csv(log));
    if (!log.abort_reason.empty()) {
      ++aborted;
      std::cerr << "seed " << log.seed << " aborted: " << log.abort_reason << "\n";
    }
  }
  write_text((fs::path(out) / (std::string("run_") + to_string(cfg.variant) + ".json")).string(),
             run_manifest_json(cfg, cfg.variant, cfg.seeds));
  std::cout << "wrote " << logs.size() << " episodes (" << to_string(cfg.variant) << ") to "
            << out << "\n";
  return aborted == 0 ? 0 : 3;
}

int cmd_aggregate(const std::string& in, const std::string& out) {
  const auto runs = aggregate_directory(in);
  write_text(out, summary_csv(runs));
  const fs::path stats = fs::path(out).replace_filename(
      fs::path(out).stem().string() + "_stats.csv");
  write_text(stats.string(), summary_stats_csv(runs));
  std::cout << summary_stats_csv(runs);
  return 0;
}

int cmd_design(const std::string& config) {
  const ScenarioConfig cfg = load_config(config);
  std::cout << design_json(cfg, offline_design(cfg));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive robust tube MPC simulator"};
  app.require_subcommand(1);
  bool deterministic = false;
  app.add_flag("--deterministic", deterministic, "Run episodes sequentially on one thread");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Simulate seeded episodes");
  run_cmd->add_option("--config", run.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seeds", run.seeds, "Use seeds 0..n-1 instead of the config list")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--variant", run.variant, "full | no_pe_check | linear_feedback")
      ->check(CLI::IsMember({"full", "no_pe_check", "linear_feedback"}));
  run_cmd->add_option("--out", run.out, "Output directory (default: config output)");
  run_cmd->add_option("--threads", run.threads, "Worker threads (default: all cores)");

  std::string agg_in;
  std::string agg_out = "summary.csv";
  auto* agg_cmd = app.add_subcommand("aggregate", "Summarize a run directory");
  agg_cmd->add_option("--in", agg_in, "Run directory")->required()->check(CLI::ExistingDirectory);
  agg_cmd->add_option("--out", agg_out, "Summary CSV path");

  std::string design_config;
  auto* design_cmd = app.add_subcommand("design", "Print offline design constants");
  design_cmd->add_option("--config", design_config, "Scenario JSON")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return cmd_run(run, deterministic);
    if (*agg_cmd) return cmd_aggregate(agg_in, agg_out);
    if (*design_cmd) return cmd_design(design_config);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

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
#ifndef ATMPC_EPISODE_IO_HPP
#define ATMPC_EPISODE_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "atmpc/harness.hpp"

namespace atmpc {

std::string format_double(double value);

std::string episode_csv(const EpisodeLog& log);
std::string timing_csv(const EpisodeLog& log);
EpisodeLog parse_episode_csv(const std::string& text);

struct Envelope {
  int count = 0;  // number of series with a value at this index
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Pointwise statistics across series; indices where no series has a value
// get count = 0.
std::vector<Envelope> envelope(const std::vector<std::vector<std::optional<double>>>& series);

struct TimingStats {
  double mean = 0.0;
  double max = 0.0;
  int count = 0;
};

struct RunSummary {
  Variant variant = Variant::Full;
  int episodes = 0;
  int aborted = 0;
  std::vector<Envelope> volume;
  std::vector<Envelope> eps;
  std::vector<Envelope> J;
  std::vector<double> gate_failure_rate;  // per episode, NaN if never evaluated
  TimingStats ms_b;
  TimingStats ms_c;
  TimingStats ms_d;
};

RunSummary aggregate_runs(const std::vector<EpisodeLog>& logs);

std::string summary_csv(const std::vector<RunSummary>& runs);
std::string summary_stats_csv(const std::vector<RunSummary>& runs);

std::string design_json(const ScenarioConfig& cfg, const OfflineDesign& design);
std::string run_manifest_json(const ScenarioConfig& cfg, Variant variant,
                              const std::vector<std::uint64_t>& seeds);

std::string episode_file_name(Variant variant, std::uint64_t seed);
std::string timing_file_name(Variant variant, std::uint64_t seed);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// Reads every episode log and timing sidecar under `dir`, checks that all run
// manifests share one scenario fingerprint and groups the logs by variant.
std::vector<RunSummary> aggregate_directory(const std::string& dir);

double median(std::vector<double> values);

}  // namespace atmpc

#endif  // ATMPC_EPISODE_IO_HPP

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
#ifndef ATMPC_HARNESS_HPP
#define ATMPC_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atmpc/config.hpp"
#include "atmpc/conic.hpp"
#include "atmpc/design.hpp"

namespace atmpc {

struct OfflineDesign {
  DesignConstants constants;
  double epsilon_phi = 0.0;
};

OfflineDesign offline_design(const ScenarioConfig& cfg);

enum class GateOutcome { Skipped, Optimizer, Fallback };
const char* to_string(GateOutcome outcome);

struct StepRecord {
  int t = 0;
  bool switched = false;  // state was reset to a new initial condition
  Vector x;
  Vector u;
  Vector mu;
  double volume = 0.0;
  Vector theta_hat;
  double J = 0.0;  // cumulative stage cost up to and including t
  std::optional<double> eps;
  int kappa = 0;
  std::optional<double> delta;
  std::optional<double> delta_hat;
  GateOutcome gate = GateOutcome::Skipped;
  std::optional<SolveStatus> status;  // empty when no optimization was run
  int estimator_failures = 0;
  double ms_b = 0.0;
  double ms_c = 0.0;
  double ms_d = 0.0;
};

struct EpisodeLog {
  Variant variant = Variant::Full;
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  std::string abort_reason;  // empty when the episode ran to T_end
};

// Seed-derived initial-condition pool: the first entry is x_0, the rest are
// used at the switch times in order.
std::vector<Vector> initial_conditions(const ScenarioConfig& cfg, const OfflineDesign& design,
                                       std::uint64_t seed);

EpisodeLog run_episode(const ScenarioConfig& cfg, const OfflineDesign& design,
                       std::uint64_t seed, Variant variant);

// Runs one episode per seed; threads ≤ 1 runs sequentially. Output order
// follows `seeds` regardless of scheduling.
std::vector<EpisodeLog> run_batch(const ScenarioConfig& cfg, const OfflineDesign& design,
                                  const std::vector<std::uint64_t>& seeds, Variant variant,
                                  unsigned threads);

}  // namespace atmpc

#endif  // ATMPC_HARNESS_HPP

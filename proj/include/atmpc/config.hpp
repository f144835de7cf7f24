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
#ifndef ATMPC_CONFIG_HPP
#define ATMPC_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atmpc/conic.hpp"
#include "atmpc/design.hpp"
#include "atmpc/estimator.hpp"
#include "atmpc/model.hpp"

namespace atmpc {

enum class Variant { Full, NoPeCheck, LinearFeedback };

const char* to_string(Variant variant);
Variant parse_variant(const std::string& name);

struct ScenarioConfig {
  UncertainModel model;
  Vector theta_true;
  ParamPolytope theta0;
  std::optional<Vector> theta_hat0;  // default: centre of Θ_0

  int N = 10;
  int Nu = 5;
  int Nmu = 5;
  int Ns = 20;
  double epsilon_threshold = 1e-6;
  int T_end = 600;
  std::vector<std::uint64_t> seeds{0};
  Variant variant = Variant::Full;

  std::vector<int> switch_times;
  std::vector<Vector> initial_conditions;  // empty: seed-derived
  double initial_radius = 0.3;             // ∞-norm of seed-derived states

  EstimatorSettings estimator;
  SolverSettings solver;
  DesignOptions design;
  bool pin_initial_tube = false;
  std::optional<int> freeze_theta_after;
  int epsilon_phi_grid = 5;
  std::string output = "out";

  void validate() const;
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);

// Canonical JSON text of the fields that define the closed loop (seeds,
// variant and output excluded). Episodes are comparable iff this matches.
std::string scenario_fingerprint(const ScenarioConfig& cfg);
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace atmpc

#endif  // ATMPC_CONFIG_HPP

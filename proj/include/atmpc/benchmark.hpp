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
#ifndef ATMPC_BENCHMARK_HPP
#define ATMPC_BENCHMARK_HPP

#include "atmpc/model.hpp"

namespace atmpc {

/// Four-state, two-input benchmark with three uncertain parameters, unit
/// box constraints on state and input, and identity cost weights.
UncertainModel benchmark_model();

/// Parameter vector that generates the benchmark's true dynamics.
Vector benchmark_theta_true();

}  // namespace atmpc

#endif  // ATMPC_BENCHMARK_HPP

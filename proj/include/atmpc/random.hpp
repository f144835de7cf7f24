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
#ifndef ATMPC_RANDOM_HPP
#define ATMPC_RANDOM_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "atmpc/estimator.hpp"
#include "atmpc/model.hpp"

namespace atmpc {

using Rng = std::mt19937_64;

/// Counter-based seed splitting: the same (seed, stream) pair always yields
/// the same child seed, and distinct streams give unrelated children.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform on [0, 1).
double uniform01(Rng& rng);

/// Uniform on the ellipsoid {y : (y−c)ᵀM(y−c) ≤ 1}.
Vector uniform_in_ellipsoid(const Ellipsoid& set, Rng& rng);

/// Uniform sampler on a bounded polytope. Draws by rejection from the vertex
/// bounding box while the observed acceptance rate stays at or above 1%,
/// then switches to hit-and-run.
class PolytopeSampler {
 public:
  explicit PolytopeSampler(const ParamPolytope& set);

  Vector draw(Rng& rng);
  [[nodiscard]] bool using_hit_and_run() const { return hit_and_run_; }

 private:
  Vector hit_and_run_step(const Vector& from, Rng& rng) const;

  ParamPolytope set_;
  Vector lower_;
  Vector upper_;
  Vector walker_;
  Matrix rounding_;
  std::int64_t attempts_ = 0;
  std::int64_t accepted_ = 0;
  bool hit_and_run_ = false;
  bool burned_in_ = false;
};

}  // namespace atmpc

#endif  // ATMPC_RANDOM_HPP

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
#ifndef ATMPC_ESTIMATOR_HPP
#define ATMPC_ESTIMATOR_HPP

#include <cstdint>
#include <vector>

#include "atmpc/conic.hpp"
#include "atmpc/model.hpp"

namespace atmpc {

/// Θ = {θ : Pi θ ≤ mu} with a fixed facet matrix.
struct ParamPolytope {
  Matrix Pi;
  Vector mu;

  [[nodiscard]] Eigen::Index dim() const { return Pi.cols(); }
  [[nodiscard]] Eigen::Index facets() const { return Pi.rows(); }
  [[nodiscard]] bool contains(const Vector& theta, double tol = 0.0) const;
  /// True when the facets are exactly ±e_i (in that order: +e_1..+e_p,
  /// −e_1..−e_p), so mu = (upper, −lower).
  [[nodiscard]] bool is_box() const;

  /// Axis-aligned box lower ≤ θ ≤ upper.
  static ParamPolytope box(const Vector& lower, const Vector& upper);
};

struct TransitionRecord {
  Vector x_prev;
  Vector u_prev;
  Vector x_next;
  Regressor regressor;
};

TransitionRecord make_record(const UncertainModel& model, const Vector& x_prev,
                             const Vector& u_prev, const Vector& x_next);

/// How a residual r = x⁺ − Φθ − φ is tested against F𝒲.
///  - Projected: w = F⁺ r must lie in 𝒲 (components of r outside range(F)
///    are ignored, which gives an outer approximation of the unfalsified set).
///  - Exact: additionally requires the components of r orthogonal to
///    range(F) to vanish, up to `exact_tol` per component.
enum class ResidualMode { Projected, Exact };

struct EstimatorSettings {
  ResidualMode mode = ResidualMode::Projected;
  double exact_tol = 1e-9;
  SolverSettings solver{};
};

struct SupportUpdate {
  Vector mu;
  /// Facet programs that ended in NumericalFailure (their offset is kept).
  int solver_failures = 0;
};

/// New offsets mu_j = max Π_j θ over Θ_prev ∩ (unfalsified sets of every
/// record). Throws EmptyIntersection if the data contradict Θ_prev.
SupportUpdate support_update(const ParamPolytope& prev,
                             const std::vector<TransitionRecord>& window,
                             const UncertainModel& model,
                             const EstimatorSettings& settings = {});

/// Euclidean projection onto Θ.
Vector project_nominal(const Vector& theta_prev, const ParamPolytope& set,
                       const SolverSettings& solver = {});

/// All vertices of a bounded polytope (combinations of dim() facets).
std::vector<Vector> enumerate_vertices(const ParamPolytope& set,
                                       double tol = 1e-9);

/// Center of the minimum enclosing Euclidean ball of the vertices.
Vector minmax_center(const ParamPolytope& set,
                     const SolverSettings& solver = {});

/// Exact for dim() ≤ 3, Monte-Carlo over the vertex bounding box otherwise.
double polytope_volume(const ParamPolytope& set,
                       std::uint64_t mc_seed = 0x5eed,
                       std::int64_t mc_samples = 1000000);

}  // namespace atmpc

#endif  // ATMPC_ESTIMATOR_HPP

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
#ifndef ATMPC_DESIGN_HPP
#define ATMPC_DESIGN_HPP

#include <optional>
#include <string>
#include <vector>

#include "atmpc/estimator.hpp"
#include "atmpc/model.hpp"

namespace atmpc {

/// Strategy for the common tube-shape matrix P.
///  - MinMax: minimizes max_j ‖A_K(θʲ)‖_P over P by a central-cut
///    ellipsoid method (quasi-convex in P).
///  - Blend: starts at the nominal Lyapunov solution and repeatedly mixes in
///    the Lyapunov solution of the worst vertex; stops at the first P whose
///    contraction factors are all ≤ 1 − 1e−3.
enum class LyapunovMethod { MinMax, Blend };

const char* to_string(LyapunovMethod method);

struct DesignOptions {
  std::optional<Vector> theta_nominal;  // default: minmax_center(Θ_0)
  std::optional<Matrix> P_override;     // verified, never modified
  LyapunovMethod method = LyapunovMethod::MinMax;
  int minmax_max_iter = 20000;
  double minmax_tol = 1e-7;
  double blend_gamma = 0.3;
  int blend_max_iter = 500;
};

struct DesignConstants {
  Matrix K;
  Matrix P;
  Matrix P_sqrt;
  Matrix P_inv_sqrt;
  Vector theta_nominal;
  std::vector<Vector> vertices;  // vertices of Θ_0
  Vector lambda;                 // ‖A_K(θʲ)‖_P per vertex
  double beta_w = 0.0;
  Vector beta_s;                 // per vertex
  double r_T = 0.0;
  Matrix Sigma_s;
  Matrix Sigma_w;
  LyapunovMethod method = LyapunovMethod::MinMax;
};

struct TerminalCost {
  Matrix P_c;
  Vector theta_ref;
};

/// LQR gain (u = Kx) for the nominal parameter. Throws Uncontrollable if any
/// listed vertex model is not reachable.
Matrix design_gain(const UncertainModel& model, const Vector& theta_nominal,
                   const std::vector<Vector>& vertices = {});

/// ‖A‖_P = max_{x≠0} ‖Ax‖_P / ‖x‖_P.
double induced_norm(const Matrix& a, const Matrix& P);

struct CommonLyapunov {
  Matrix P;
  Vector lambda;
  int iterations = 0;
};

CommonLyapunov common_lyapunov(const UncertainModel& model, const Matrix& K,
                               const std::vector<Vector>& vertices,
                               const DesignOptions& options = {});

/// max over {y : yᵀ P_E y ≤ 1} of ‖M y‖²_P.
double ellipsoid_image_radius(const Matrix& P, const Matrix& M,
                              const Ellipsoid& E);

/// Largest r with {‖x‖_P ≤ r} ⊆ 𝒳, K{‖x‖_P ≤ r} ⊕ 𝒮 ⊆ 𝒰 and
/// λ_j r + √β_s[j] + √β_w ≤ r for every vertex. Throws TerminalSetEmpty.
double terminal_radius(const UncertainModel& model, const DesignConstants& d);

TerminalCost terminal_cost(const UncertainModel& model, const Matrix& K,
                           const Vector& theta_hat);

/// Covariance of the uniform distribution on an ellipsoid: M⁻¹/(n+2).
Matrix uniform_ellipsoid_covariance(const Ellipsoid& E);

/// Full offline stage for the initial parameter set.
DesignConstants design(const UncertainModel& model, const ParamPolytope& theta0,
                       const DesignOptions& options = {});

}  // namespace atmpc

#endif  // ATMPC_DESIGN_HPP

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
#ifndef ATMPC_CONIC_HPP
#define ATMPC_CONIC_HPP

#include <vector>

#include "atmpc/linalg.hpp"

namespace atmpc {

/// ‖C y + d‖ ≤ eᵀ y + f
struct SocConstraint {
  Matrix C;
  Vector d;
  Vector e;
  double f = 0.0;
};

/// minimize cᵀy  s.t.  A_eq y = b_eq,  A_in y ≤ b_in,  every SOC constraint.
struct ConicProgram {
  Vector c;
  Matrix A_eq;
  Vector b_eq;
  Matrix A_in;
  Vector b_in;
  std::vector<SocConstraint> soc;

  ConicProgram() = default;
  explicit ConicProgram(Eigen::Index num_vars);

  [[nodiscard]] Eigen::Index num_vars() const { return c.size(); }

  void add_equality(const Vector& row, double rhs);
  void add_inequality(const Vector& row, double rhs);
  void add_soc(SocConstraint cone);
  /// Appends `count` zero columns; returns the index of the first new one.
  Eigen::Index add_variables(Eigen::Index count);

  void validate() const;

  /// Largest violation of any constraint at y (equalities in absolute value).
  [[nodiscard]] double max_violation(const Vector& y) const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(SolveStatus status);

struct SolverSettings {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  int max_iter = 200;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Vector y;
  double objective = 0.0;
  /// Dual objective; a lower bound on the optimal value when dual feasible.
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

/// Primal-dual interior-point method on the homogeneous self-dual embedding
/// with Nesterov-Todd scaling and Mehrotra correction. Dense linear algebra;
/// deterministic for a given input.
ConicSolution solve(const ConicProgram& prog, const SolverSettings& settings = {});

/// Result of rewriting min ½yᵀHy + gᵀy + cᵀy as an SOC epigraph program.
struct EpigraphProgram {
  ConicProgram program;
  Eigen::Index t_index = 0;
  /// ½yᵀHy + (g+c)ᵀy = ½ t² − constant at the optimum.
  double constant = 0.0;

  [[nodiscard]] double quadratic_value(double t) const {
    return 0.5 * t * t - constant;
  }
};

/// Augments `prog` with an epigraph variable t and the cone
/// ‖L y + L⁻ᵀ(g + c)‖ ≤ t where H = LᵀL, and makes t the only cost.
/// `offset` places H (square, dim k) on y[offset, offset+k).
EpigraphProgram min_quadratic_via_epigraph(const Matrix& H, const Vector& g,
                                           const ConicProgram& prog,
                                           Eigen::Index offset = 0);

}  // namespace atmpc

#endif  // ATMPC_CONIC_HPP

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
#ifndef ATMPC_TUBE_MPC_HPP
#define ATMPC_TUBE_MPC_HPP

#include <vector>

#include "atmpc/conic.hpp"
#include "atmpc/design.hpp"
#include "atmpc/model.hpp"

namespace atmpc {

struct TubeProblemSpec {
  Vector x;                       // current state
  std::vector<Vector> vertices;   // vertices of Θ_t
  Vector theta_hat;               // cost model
  Vector theta_bar;               // tube-centre model
  const DesignConstants* design = nullptr;
  const TerminalCost* terminal = nullptr;
  int N = 10;
  bool pin_initial_tube = false;
  /// Use ‖A_K(θʲ)‖_P of the current vertices; otherwise the largest offline
  /// contraction factor of Θ_0.
  bool online_contraction = true;
};

struct TubeSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Matrix v;      // n_u × N, column k is v_k
  Matrix z;      // n_x × (N+1)
  Vector sigma;  // N+1
  double J = 0.0;
  int iterations = 0;
};

/// Variable layout of the assembled program.
struct TubeLayout {
  Eigen::Index v_offset = 0;
  Eigen::Index z0_offset = 0;
  Eigen::Index sigma_offset = 0;
  Eigen::Index t_index = 0;
  /// z_k = Z[k] · y (affine part is zero: the centres are linear in y).
  std::vector<Matrix> Z;
};

struct AssembledTube {
  ConicProgram program;
  TubeLayout layout;
  /// The epigraph constant: J = ½t² − constant at the optimum.
  double cost_constant = 0.0;
};

AssembledTube assemble(const UncertainModel& model, const TubeProblemSpec& spec);

TubeSolution solve_mpc(const UncertainModel& model, const TubeProblemSpec& spec,
                       const SolverSettings& settings = {});

/// Σ_{k<N} (‖x̂_k‖²_Q + ‖Kx̂_k + v_k‖²_R) + x̂_Nᵀ P_c x̂_N with x̂_0 = x and
/// x̂_{k+1} = A_K(θ̂)x̂_k + B(θ̂)v_k.
double evaluate_cost(const UncertainModel& model, const Matrix& K,
                     const Vector& x, const Vector& theta_hat, const Matrix& v,
                     const Matrix& P_c);

/// Largest violation of the tube constraints by a candidate (positive means
/// violated); used to audit solver output and shifted candidates.
double tube_violation(const UncertainModel& model, const TubeProblemSpec& spec,
                      const Matrix& v, const Matrix& z, const Vector& sigma);

}  // namespace atmpc

#endif  // ATMPC_TUBE_MPC_HPP

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
#ifndef ATMPC_MODEL_HPP
#define ATMPC_MODEL_HPP

#include <vector>

#include "atmpc/linalg.hpp"

namespace atmpc {

/// Polyhedron {x : a_j·x ≤ b_j}; rows of `normals` are the a_j.
struct HalfspaceSet {
  Matrix normals;
  Vector offsets;

  [[nodiscard]] Eigen::Index dim() const { return normals.cols(); }
  [[nodiscard]] Eigen::Index size() const { return normals.rows(); }
  [[nodiscard]] bool contains(const Vector& x, double tol = 0.0) const;
  /// Largest constraint value a_j·x − b_j.
  [[nodiscard]] double max_violation(const Vector& x) const;

  /// Throws unless offsets are positive (origin interior) and the set is
  /// bounded along every ± coordinate direction.
  void validate() const;

  /// {x : ‖x‖_∞ ≤ bound} in `dim` dimensions.
  static HalfspaceSet box(Eigen::Index dim, double bound);
};

/// {y : (y−c)ᵀ M (y−c) ≤ 1} with M symmetric positive definite.
class Ellipsoid {
 public:
  Ellipsoid() = default;
  explicit Ellipsoid(Matrix shape);
  Ellipsoid(Matrix shape, Vector center);

  [[nodiscard]] const Matrix& shape() const { return shape_; }
  [[nodiscard]] const Vector& center() const { return center_; }
  [[nodiscard]] Eigen::Index dim() const { return shape_.rows(); }
  /// (y−c)ᵀ M (y−c)
  [[nodiscard]] double level(const Vector& y) const;
  /// max over the set of d·y
  [[nodiscard]] double support(const Vector& direction) const;
  /// Lower Cholesky factor L with M = L Lᵀ.
  [[nodiscard]] const Matrix& cholesky_lower() const { return chol_; }

 private:
  Matrix shape_;
  Vector center_;
  Matrix chol_;
};

/// Columns i of `Phi` are A_i x + B_i u; `phi` = A_0 x + B_0 u.
struct Regressor {
  Matrix Phi;
  Vector phi;
};

/// x⁺ = A(θ)x + B(θ)u + F w with (A(θ),B(θ)) = Σ θ_i (A_i,B_i), θ_0 ≡ 1.
struct UncertainModel {
  std::vector<Matrix> A_basis;  // p+1 entries, n_x × n_x
  std::vector<Matrix> B_basis;  // p+1 entries, n_x × n_u
  Matrix F;                     // n_x × n_w
  HalfspaceSet X;
  HalfspaceSet U;
  Ellipsoid W;
  Ellipsoid S;
  Matrix Q;
  Matrix R;

  [[nodiscard]] Eigen::Index nx() const { return F.rows(); }
  [[nodiscard]] Eigen::Index nu() const { return B_basis.front().cols(); }
  [[nodiscard]] Eigen::Index nw() const { return F.cols(); }
  [[nodiscard]] Eigen::Index p() const {
    return static_cast<Eigen::Index>(A_basis.size()) - 1;
  }

  /// Dimension, symmetry and definiteness checks; also rejects an F
  /// without full column rank.
  void validate() const;
};

struct SystemMatrices {
  Matrix A;
  Matrix B;
};

SystemMatrices assemble_system(const UncertainModel& model,
                               const Vector& theta);

/// A(θ) + B(θ) K
Matrix closed_loop(const UncertainModel& model, const Vector& theta,
                   const Matrix& K);

Regressor build_regressor(const UncertainModel& model, const Vector& x,
                          const Vector& u);

Vector step_dynamics(const UncertainModel& model, const Vector& x,
                     const Vector& u, const Vector& w, const Vector& theta);

}  // namespace atmpc

#endif  // ATMPC_MODEL_HPP

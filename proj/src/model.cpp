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
#include "atmpc/model.hpp"

#include <cmath>
#include <string>

#include "atmpc/error.hpp"

namespace atmpc {

bool HalfspaceSet::contains(const Vector& x, double tol) const {
  return max_violation(x) <= tol;
}

double HalfspaceSet::max_violation(const Vector& x) const {
  require(x.size() == dim(), ErrorCode::DimensionMismatch,
          "HalfspaceSet::max_violation");
  if (size() == 0) return -std::numeric_limits<double>::infinity();
  return (normals * x - offsets).maxCoeff();
}

void HalfspaceSet::validate() const {
  require(normals.rows() == offsets.size() && normals.rows() > 0,
          ErrorCode::DimensionMismatch, "HalfspaceSet rows/offsets");
  require((offsets.array() > 0.0).all(), ErrorCode::InvalidArgument,
          "HalfspaceSet must contain the origin in its interior");
  // Bounded along +e_i iff some normal has a positive i-th component (and
  // similarly for −e_i) is necessary but not sufficient; we check the exact
  // condition: for each direction d = ±e_i there is no recession direction,
  // i.e. the cone {r : normals·r ≤ 0} contains no r with d·r > 0. For the
  // small sets used here we test the recession cone via its generators:
  // a set is bounded iff the normals positively span R^n, which holds iff
  // for every unit direction d the LP max d·r s.t. normals·r ≤ 0 is 0.
  // The positive-span test is done by checking that every ±e_i lies in the
  // conic hull of the normals (non-negative least squares by active sets).
  const Eigen::Index n = dim();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vector target = Vector::Zero(n);
      target(i) = sign;
      // Lawson–Hanson NNLS: min ‖Nᵀλ − target‖, λ ≥ 0.
      const Matrix At = normals.transpose();
      const Eigen::Index m = At.cols();
      Vector lambda = Vector::Zero(m);
      std::vector<bool> passive(static_cast<std::size_t>(m), false);
      for (int outer = 0; outer < 3 * static_cast<int>(m) + 10; ++outer) {
        Vector grad = At.transpose() * (target - At * lambda);
        Eigen::Index best = -1;
        double best_val = 1e-12;
        for (Eigen::Index j = 0; j < m; ++j)
          if (!passive[static_cast<std::size_t>(j)] && grad(j) > best_val) {
            best_val = grad(j);
            best = j;
          }
        if (best < 0) break;
        passive[static_cast<std::size_t>(best)] = true;
        for (int inner = 0; inner < 3 * static_cast<int>(m) + 10; ++inner) {
          std::vector<Eigen::Index> idx;
          for (Eigen::Index j = 0; j < m; ++j)
            if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
          Matrix sub(n, static_cast<Eigen::Index>(idx.size()));
          for (std::size_t k = 0; k < idx.size(); ++k)
            sub.col(static_cast<Eigen::Index>(k)) = At.col(idx[k]);
          Vector z = sub.completeOrthogonalDecomposition().solve(target);
          bool ok = (z.array() > 0.0).all();
          if (ok) {
            lambda.setZero();
            for (std::size_t k = 0; k < idx.size(); ++k)
              lambda(idx[k]) = z(static_cast<Eigen::Index>(k));
            break;
          }
          double alpha = 1.0;
          for (std::size_t k = 0; k < idx.size(); ++k) {
            const double zk = z(static_cast<Eigen::Index>(k));
            if (zk <= 0.0) {
              const double l = lambda(idx[k]);
              alpha = std::min(alpha, l / (l - zk));
            }
          }
          for (std::size_t k = 0; k < idx.size(); ++k)
            lambda(idx[k]) +=
                alpha * (z(static_cast<Eigen::Index>(k)) - lambda(idx[k]));
          for (std::size_t k = 0; k < idx.size(); ++k)
            if (lambda(idx[k]) <= 1e-15) {
              lambda(idx[k]) = 0.0;
              passive[static_cast<std::size_t>(idx[k])] = false;
            }
        }
      }
      const double residual = (At * lambda - target).norm();
      require(residual <= 1e-9, ErrorCode::InvalidArgument,
              "HalfspaceSet is unbounded along coordinate " +
                  std::to_string(i) + (sign > 0 ? " (+)" : " (-)"));
    }
  }
}

HalfspaceSet HalfspaceSet::box(Eigen::Index dim, double bound) {
  HalfspaceSet set;
  set.normals.resize(2 * dim, dim);
  set.normals << Matrix::Identity(dim, dim), -Matrix::Identity(dim, dim);
  set.offsets = Vector::Constant(2 * dim, bound);
  return set;
}

Ellipsoid::Ellipsoid(Matrix shape)
    : Ellipsoid(shape, Vector::Zero(shape.rows())) {}

Ellipsoid::Ellipsoid(Matrix shape, Vector center)
    : shape_(std::move(shape)), center_(std::move(center)) {
  require(shape_.rows() == shape_.cols() && center_.size() == shape_.rows(),
          ErrorCode::DimensionMismatch, "Ellipsoid shape/center");
  require(shape_.allFinite() && linalg::is_symmetric(shape_),
          ErrorCode::NotPositiveDefinite, "Ellipsoid shape not symmetric");
  Eigen::LLT<Matrix> llt(shape_);
  require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite,
          "Ellipsoid shape not positive definite");
  chol_ = llt.matrixL();
}

double Ellipsoid::level(const Vector& y) const {
  const Vector d = y - center_;
  return d.dot(shape_ * d);
}

double Ellipsoid::support(const Vector& direction) const {
  // max d·y = d·c + sqrt(dᵀ M⁻¹ d)
  const Vector s = chol_.triangularView<Eigen::Lower>().solve(direction);
  return direction.dot(center_) + s.norm();
}

void UncertainModel::validate() const {
  require(!A_basis.empty() && A_basis.size() == B_basis.size(),
          ErrorCode::DimensionMismatch, "basis lists must have equal length");
  const Eigen::Index n = F.rows();
  const Eigen::Index m = B_basis.front().cols();
  for (std::size_t i = 0; i < A_basis.size(); ++i) {
    require(A_basis[i].rows() == n && A_basis[i].cols() == n,
            ErrorCode::DimensionMismatch, "A_" + std::to_string(i));
    require(B_basis[i].rows() == n && B_basis[i].cols() == m,
            ErrorCode::DimensionMismatch, "B_" + std::to_string(i));
  }
  require(X.dim() == n, ErrorCode::DimensionMismatch, "state constraints");
  require(U.dim() == m, ErrorCode::DimensionMismatch, "input constraints");
  require(W.dim() == F.cols(), ErrorCode::DimensionMismatch,
          "disturbance set");
  require(S.dim() == m, ErrorCode::DimensionMismatch, "excitation set");
  require(Q.rows() == n && R.rows() == m, ErrorCode::DimensionMismatch,
          "cost weights");
  require(linalg::is_positive_definite(Q), ErrorCode::NotPositiveDefinite,
          "Q");
  require(linalg::is_positive_definite(R), ErrorCode::NotPositiveDefinite,
          "R");
  X.validate();
  U.validate();
  Eigen::ColPivHouseholderQR<Matrix> qr(F);
  qr.setThreshold(1e-10);
  require(F.cols() > 0 && qr.rank() == F.cols(), ErrorCode::InvalidArgument,
          "F must have full column rank");
}

SystemMatrices assemble_system(const UncertainModel& model,
                               const Vector& theta) {
  require(theta.size() == model.p(), ErrorCode::DimensionMismatch,
          "theta has length " + std::to_string(theta.size()) + ", expected " +
              std::to_string(model.p()));
  SystemMatrices out{model.A_basis[0], model.B_basis[0]};
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const auto k = static_cast<std::size_t>(i + 1);
    out.A += theta(i) * model.A_basis[k];
    out.B += theta(i) * model.B_basis[k];
  }
  return out;
}

Matrix closed_loop(const UncertainModel& model, const Vector& theta,
                   const Matrix& K) {
  const auto sys = assemble_system(model, theta);
  return sys.A + sys.B * K;
}

Regressor build_regressor(const UncertainModel& model, const Vector& x,
                          const Vector& u) {
  require(x.size() == model.nx() && u.size() == model.nu(),
          ErrorCode::DimensionMismatch, "build_regressor");
  Regressor r;
  r.Phi.resize(model.nx(), model.p());
  for (Eigen::Index i = 0; i < model.p(); ++i) {
    const auto k = static_cast<std::size_t>(i + 1);
    r.Phi.col(i) = model.A_basis[k] * x + model.B_basis[k] * u;
  }
  r.phi = model.A_basis[0] * x + model.B_basis[0] * u;
  return r;
}

Vector step_dynamics(const UncertainModel& model, const Vector& x,
                     const Vector& u, const Vector& w, const Vector& theta) {
  require(w.size() == model.nw(), ErrorCode::DimensionMismatch,
          "step_dynamics: w");
  const auto sys = assemble_system(model, theta);
  require(x.size() == model.nx() && u.size() == model.nu(),
          ErrorCode::DimensionMismatch, "step_dynamics");
  return sys.A * x + sys.B * u + model.F * w;
}

}  // namespace atmpc

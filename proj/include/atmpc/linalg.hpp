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
#ifndef ATMPC_LINALG_HPP
#define ATMPC_LINALG_HPP

#include <Eigen/Dense>

namespace atmpc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// Eigenvalues (ascending) and eigenvectors of a small symmetric matrix by
/// cyclic Jacobi rotations. Iterates until the off-diagonal Frobenius norm
/// falls below `tol` times the matrix norm.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;  // columns, matching `values`
};
SymmetricEigen jacobi_eigen(const Matrix& a, double tol = 1e-12,
                            int max_sweeps = 100);

/// Smallest eigenvalue of a symmetric matrix (Jacobi).
double lambda_min(const Matrix& a);

/// Symmetric positive definite square root and its inverse.
Matrix sqrtm_spd(const Matrix& a);
Matrix inv_sqrtm_spd(const Matrix& a);

bool is_symmetric(const Matrix& a, double tol = 1e-10);
bool is_positive_definite(const Matrix& a);

double spectral_radius(const Matrix& a);

/// Solves Aᵀ X A − X + Q = 0 for X. Requires spectral_radius(A) < 1.
Matrix dlyap(const Matrix& a, const Matrix& q);

/// Stabilizing solution of the discrete algebraic Riccati equation and the
/// associated gain K with u = K x (note the sign: A + B K is stable).
struct DareResult {
  Matrix X;
  Matrix K;
  int iterations = 0;
};
DareResult dare(const Matrix& a, const Matrix& b, const Matrix& q,
                const Matrix& r, double tol = 1e-12, int max_iter = 100000);

int controllability_rank(const Matrix& a, const Matrix& b, double tol = 1e-9);

/// Largest generalized eigenvalue of (S, P) for symmetric S and SPD P,
/// i.e. max_x xᵀSx / xᵀPx, with the maximizing x.
struct GeneralizedMax {
  double value = 0.0;
  Vector vector;
};
GeneralizedMax generalized_max(const Matrix& s, const Matrix& p);

}  // namespace linalg
}  // namespace atmpc

#endif  // ATMPC_LINALG_HPP

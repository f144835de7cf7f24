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
#include "atmpc/linalg.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "atmpc/error.hpp"

namespace atmpc::linalg {

SymmetricEigen jacobi_eigen(const Matrix& a_in, double tol, int max_sweeps) {
  require(a_in.rows() == a_in.cols(), ErrorCode::DimensionMismatch,
          "jacobi_eigen needs a square matrix");
  const Eigen::Index n = a_in.rows();
  Matrix a = 0.5 * (a_in + a_in.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off) <= tol * scale) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  // Sort ascending; selection sort keeps the ordering deterministic.
  SymmetricEigen out;
  out.values = a.diagonal();
  out.vectors = v;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = i;
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (out.values(j) < out.values(best)) best = j;
    if (best != i) {
      std::swap(out.values(i), out.values(best));
      out.vectors.col(i).swap(out.vectors.col(best));
    }
  }
  return out;
}

double lambda_min(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  return jacobi_eigen(a).values(0);
}

Matrix sqrtm_spd(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  require(es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0,
          ErrorCode::NotPositiveDefinite, "sqrtm_spd");
  return es.operatorSqrt();
}

Matrix inv_sqrtm_spd(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  require(es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0,
          ErrorCode::NotPositiveDefinite, "inv_sqrtm_spd");
  return es.operatorInverseSqrt();
}

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.transpose()).cwiseAbs().maxCoeff() <=
         tol * std::max(1.0, a.cwiseAbs().maxCoeff());
}

bool is_positive_definite(const Matrix& a) {
  if (!is_symmetric(a)) return false;
  Eigen::LLT<Matrix> llt(a);
  return llt.info() == Eigen::Success;
}

double spectral_radius(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix dlyap(const Matrix& a, const Matrix& q) {
  const Eigen::Index n = a.rows();
  require(a.cols() == n && q.rows() == n && q.cols() == n,
          ErrorCode::DimensionMismatch, "dlyap");
  require(spectral_radius(a) < 1.0, ErrorCode::UnstableClosedLoop,
          "dlyap: A is not Schur stable");
  // vec(AᵀXA) = (Aᵀ ⊗ Aᵀ) vec(X)
  const Eigen::Index n2 = n * n;
  Matrix lhs = Matrix::Identity(n2, n2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      lhs.block(i * n, j * n, n, n) -= a(j, i) * a.transpose();
  Vector rhs = Eigen::Map<const Vector>(q.data(), n2);
  Eigen::PartialPivLU<Matrix> lu(lhs);
  Vector sol = lu.solve(rhs);
  // One step of iterative refinement.
  sol += lu.solve(rhs - lhs * sol);
  Matrix x = Eigen::Map<Matrix>(sol.data(), n, n);
  return 0.5 * (x + x.transpose());
}

DareResult dare(const Matrix& a, const Matrix& b, const Matrix& q,
                const Matrix& r, double tol, int max_iter) {
  const Eigen::Index n = a.rows();
  require(a.cols() == n && b.rows() == n && q.rows() == n && q.cols() == n &&
              r.rows() == b.cols() && r.cols() == b.cols(),
          ErrorCode::DimensionMismatch, "dare");
  DareResult out;
  Matrix x = q;
  for (int it = 1; it <= max_iter; ++it) {
    const Matrix btx = b.transpose() * x;
    const Matrix gain = (r + btx * b).ldlt().solve(btx * a);
    Matrix next = q + a.transpose() * x * a - a.transpose() * x * b * gain;
    next = 0.5 * (next + next.transpose());
    const double change = (next - x).norm();
    x = std::move(next);
    if (!x.allFinite()) break;
    if (change <= tol * std::max(1.0, x.norm())) {
      out.X = x;
      out.K = -(r + b.transpose() * x * b)
                   .ldlt()
                   .solve(b.transpose() * x * a);
      out.iterations = it;
      return out;
    }
  }
  throw Error(ErrorCode::RiccatiNonConvergence,
              "Riccati iteration did not converge");
}

int controllability_rank(const Matrix& a, const Matrix& b, double tol) {
  const Eigen::Index n = a.rows();
  Matrix ctrb(n, n * b.cols());
  Matrix block = b;
  for (Eigen::Index k = 0; k < n; ++k) {
    ctrb.middleCols(k * b.cols(), b.cols()) = block;
    block = a * block;
  }
  Eigen::JacobiSVD<Matrix> svd(ctrb);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++rank;
  return rank;
}

GeneralizedMax generalized_max(const Matrix& s, const Matrix& p) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(
      0.5 * (s + s.transpose()), 0.5 * (p + p.transpose()));
  require(es.info() == Eigen::Success, ErrorCode::NotPositiveDefinite,
          "generalized_max");
  const Eigen::Index last = s.rows() - 1;
  return {es.eigenvalues()(last), es.eigenvectors().col(last)};
}

}  // namespace atmpc::linalg

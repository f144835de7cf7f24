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
#include "atmpc/pe_check.hpp"

#include <algorithm>
#include <limits>

#include "atmpc/error.hpp"
#include "atmpc/linalg.hpp"

namespace atmpc {

UncertaintySample sample_uncertainty(PolytopeSampler& theta_sampler,
                                     const Ellipsoid& W, int N, Rng& rng) {
  UncertaintySample s;
  s.theta = theta_sampler.draw(rng);
  s.w.reserve(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) s.w.push_back(uniform_in_ellipsoid(W, rng));
  return s;
}

HistoryBuffer::HistoryBuffer(int length, Eigen::Index nx, Eigen::Index nu)
    : x_(static_cast<std::size_t>(std::max(length, 0)), Vector::Zero(nx)),
      u_(static_cast<std::size_t>(std::max(length, 0)), Vector::Zero(nu)) {}

void HistoryBuffer::push(const Vector& x, const Vector& u) {
  if (x_.empty()) return;
  x_.pop_front();
  u_.pop_front();
  x_.push_back(x);
  u_.push_back(u);
}

Trajectory rollout(const UncertainModel& model, const Matrix& K, const Matrix& v,
                   const UncertaintySample& sample, const HistoryBuffer& history,
                   const Vector& x_now, int k_max) {
  require(k_max < v.cols() && k_max < static_cast<int>(sample.w.size()),
          ErrorCode::DimensionMismatch, "rollout: k_max beyond the plan");
  Trajectory tr;
  tr.k_min = -history.length();
  for (int i = 0; i < history.length(); ++i) {
    tr.x.push_back(history.x(i));
    tr.u.push_back(history.u(i));
  }
  const auto sys = assemble_system(model, sample.theta);
  Vector x = x_now;
  for (int k = 0; k <= k_max; ++k) {
    const Vector u = K * x + v.col(k);
    tr.x.push_back(x);
    tr.u.push_back(u);
    x = sys.A * x + sys.B * u + model.F * sample.w[static_cast<std::size_t>(k)];
  }
  tr.x.push_back(x);
  return tr;
}

Matrix expected_gram(const UncertainModel& model, const Matrix& K,
                     const Matrix& M, const Matrix& Sigma_s) {
  const Eigen::Index p = model.p();
  std::vector<Matrix> G, BS;
  for (Eigen::Index i = 1; i <= p; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    G.push_back(model.A_basis[ii] + model.B_basis[ii] * K);
    BS.push_back(model.B_basis[ii]);
  }
  Matrix E(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i; j < p; ++j) {
      const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(j);
      const double value = (G[a].transpose() * G[b] * M).trace() +
                           (BS[a].transpose() * BS[b] * Sigma_s).trace();
      E(i, j) = value;
      E(j, i) = value;
    }
  return E;
}

Matrix pe_matrix(const PeContext& ctx, int kappa, const Matrix& v,
                 const UncertaintySample& sample, const HistoryBuffer& history,
                 const Vector& x_now) {
  const UncertainModel& model = *ctx.model;
  require(kappa >= -ctx.Nu + 1 && kappa <= ctx.N - 1, ErrorCode::InvalidArgument,
          "pe_matrix: kappa out of range");
  require(history.length() >= ctx.Nu - 1, ErrorCode::InvalidArgument,
          "pe_matrix: history shorter than the window");
  const int last = kappa + ctx.Nu - 1;
  const int k_max = std::min(last, ctx.N - 1);
  const Trajectory tr = rollout(model, *ctx.K, v, sample, history, x_now, k_max);
  Matrix psi = Matrix::Zero(model.p(), model.p());
  for (int k = kappa; k <= k_max; ++k) {
    const Regressor r = build_regressor(model, tr.x_at(k), tr.u_at(k));
    psi.noalias() += r.Phi.transpose() * r.Phi;
  }
  if (last >= ctx.N) {
    const auto sys = assemble_system(model, sample.theta);
    const Matrix a_k = sys.A + sys.B * *ctx.K;
    const Matrix drive = sys.B * *ctx.Sigma_s * sys.B.transpose() +
                         model.F * *ctx.Sigma_w * model.F.transpose();
    const Vector& xn = tr.x_at(ctx.N);
    Matrix M = xn * xn.transpose();
    for (int k = ctx.N; k <= last; ++k) {
      psi += expected_gram(model, *ctx.K, M, *ctx.Sigma_s);
      M = a_k * M * a_k.transpose() + drive;
    }
  }
  return 0.5 * (psi + psi.transpose());
}

double min_eigenvalue(const Matrix& psi) {
  return std::max(linalg::lambda_min(psi), 0.0);
}

double delta_over_samples(const PeContext& ctx, int kappa, const Matrix& v,
                          const std::vector<UncertaintySample>& samples,
                          const HistoryBuffer& history, const Vector& x_now) {
  require(!samples.empty(), ErrorCode::InvalidArgument,
          "delta_over_samples: no samples");
  double delta = std::numeric_limits<double>::infinity();
  for (const auto& s : samples)
    delta = std::min(delta, min_eigenvalue(pe_matrix(ctx, kappa, v, s, history, x_now)));
  return delta;
}

Matrix make_fallback(const Matrix& v_prev, const Vector& s) {
  require(v_prev.cols() >= 1, ErrorCode::NoPreviousPlan,
          "make_fallback: no previous plan");
  require(s.size() == v_prev.rows(), ErrorCode::DimensionMismatch,
          "make_fallback: excitation size");
  Matrix out(v_prev.rows(), v_prev.cols());
  const Eigen::Index n = v_prev.cols();
  out.leftCols(n - 1) = v_prev.rightCols(n - 1);
  out.col(n - 1) = s;
  return out;
}

GateDecision pe_gate(double delta, double delta_hat, double epsilon) {
  return delta < delta_hat + epsilon ? GateDecision::AdoptFallback
                                     : GateDecision::AdoptOptimizer;
}

int advance_window(int kappa, int N, int Nu) {
  return kappa > -Nu + 1 ? kappa - 1 : N - 1;
}

double epsilon_phi_bound(const UncertainModel& model, const Matrix& K,
                         const Matrix& Sigma_s, const Matrix& Sigma_w,
                         const std::vector<Vector>& theta_points, int Nu) {
  require(!theta_points.empty(), ErrorCode::InvalidArgument,
          "epsilon_phi_bound: no parameter points");
  double bound = std::numeric_limits<double>::infinity();
  for (const auto& th : theta_points) {
    const auto sys = assemble_system(model, th);
    const Matrix a_k = sys.A + sys.B * K;
    const Matrix drive = sys.B * Sigma_s * sys.B.transpose() +
                         model.F * Sigma_w * model.F.transpose();
    Matrix M = Matrix::Zero(model.nx(), model.nx());
    Matrix sum = Matrix::Zero(model.p(), model.p());
    for (int k = 0; k < Nu; ++k) {
      sum += expected_gram(model, K, M, Sigma_s);
      M = a_k * M * a_k.transpose() + drive;
    }
    bound = std::min(bound, linalg::lambda_min(sum));
  }
  return std::max(bound, 0.0);
}

std::vector<Vector> refinement_points(const ParamPolytope& set, int per_axis) {
  std::vector<Vector> points = enumerate_vertices(set);
  if (per_axis < 2) return points;
  const Eigen::Index p = set.dim();
  Vector lo = points.front(), hi = points.front();
  for (const auto& v : points) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  std::vector<int> idx(static_cast<std::size_t>(p), 0);
  while (true) {
    Vector th(p);
    for (Eigen::Index i = 0; i < p; ++i)
      th(i) = lo(i) + (hi(i) - lo(i)) * idx[static_cast<std::size_t>(i)] / (per_axis - 1);
    if (set.contains(th, 1e-12)) points.push_back(th);
    Eigen::Index i = 0;
    while (i < p && ++idx[static_cast<std::size_t>(i)] == per_axis) {
      idx[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == p) break;
  }
  return points;
}

double closed_loop_pe_coefficient(const std::vector<Matrix>& regressors) {
  require(!regressors.empty(), ErrorCode::InvalidArgument,
          "closed_loop_pe_coefficient: empty window");
  Matrix sum = Matrix::Zero(regressors.front().cols(), regressors.front().cols());
  for (const auto& phi : regressors) sum.noalias() += phi.transpose() * phi;
  return linalg::lambda_min(0.5 * (sum + sum.transpose()));
}

}  // namespace atmpc

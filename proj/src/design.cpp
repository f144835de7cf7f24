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
#include "atmpc/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "atmpc/error.hpp"
#include "atmpc/linalg.hpp"

namespace atmpc {

namespace {

// Coordinates of a symmetric n×n matrix: its upper triangle, row by row.
Eigen::Index svec_size(Eigen::Index n) { return n * (n + 1) / 2; }

Matrix smat(const Vector& p, Eigen::Index n) {
  Matrix m(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      m(i, j) = p(k);
      m(j, i) = p(k);
      ++k;
    }
  return m;
}

Vector svec(const Matrix& m) {
  const Eigen::Index n = m.rows();
  Vector p(svec_size(n));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) p(k++) = m(i, j);
  return p;
}

// g with g·svec(P) = ⟨G, P⟩ for symmetric G and P.
Vector inner_gradient(const Matrix& g) {
  const Eigen::Index n = g.rows();
  Vector out(svec_size(n));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      out(k++) = i == j ? g(i, i) : g(i, j) + g(j, i);
  return out;
}

Vector contraction_factors(const std::vector<Matrix>& closed, const Matrix& P) {
  Vector lambda(static_cast<Eigen::Index>(closed.size()));
  for (std::size_t j = 0; j < closed.size(); ++j)
    lambda(static_cast<Eigen::Index>(j)) = induced_norm(closed[j], P);
  return lambda;
}

CommonLyapunov minmax_lyapunov(const std::vector<Matrix>& closed,
                               const Matrix& start,
                               const DesignOptions& options) {
  const Eigen::Index n = start.rows();
  const Eigen::Index m = svec_size(n);
  const double md = static_cast<double>(m);
  const Matrix p0 = start / linalg::lambda_min(start);
  const double tau = 100.0 * std::max(static_cast<double>(n), p0.trace());
  const double radius = tau + p0.norm();

  Vector x = svec(p0);
  Matrix E = radius * radius * Matrix::Identity(m, m);
  CommonLyapunov best{p0, contraction_factors(closed, p0), 0};
  double best_value = best.lambda.maxCoeff();

  int it = 0;
  for (; it < options.minmax_max_iter; ++it) {
    const Matrix P = smat(x, n);
    const auto eig = linalg::jacobi_eigen(P);
    Vector g;
    if (eig.values(0) < 1.0) {
      const Vector u = eig.vectors.col(0);
      g = -inner_gradient(u * u.transpose());
    } else if (P.trace() > tau) {
      g = inner_gradient(Matrix::Identity(n, n));
    } else {
      double worst = -1.0;
      Vector v;
      std::size_t jstar = 0;
      for (std::size_t j = 0; j < closed.size(); ++j) {
        const auto gm = linalg::generalized_max(
            closed[j].transpose() * P * closed[j], P);
        if (gm.value > worst) {
          worst = gm.value;
          v = gm.vector;
          jstar = j;
        }
      }
      const double gamma = std::sqrt(std::max(worst, 0.0));
      if (gamma < best_value) {
        best_value = gamma;
        best.P = P;
      }
      const Vector av = closed[jstar] * v;
      g = inner_gradient(av * av.transpose() - worst * v * v.transpose());
    }
    const Vector eg = E * g;
    const double den = std::sqrt(std::max(g.dot(eg), 0.0));
    if (den <= 0.0) break;
    x -= eg / ((md + 1.0) * den);
    E = (md * md / (md * md - 1.0)) *
        (E - (2.0 / (md + 1.0)) * (eg * eg.transpose()) / (den * den));
    E = 0.5 * (E + E.transpose());
    if (std::sqrt(E.trace()) < options.minmax_tol * (1.0 + x.norm())) break;
  }
  best.lambda = contraction_factors(closed, best.P);
  best.iterations = it;
  return best;
}

CommonLyapunov blend_lyapunov(const std::vector<Matrix>& closed,
                              const Matrix& start, const Matrix& q_eff,
                              const DesignOptions& options) {
  CommonLyapunov out{start, contraction_factors(closed, start), 0};
  for (int it = 0; it < options.blend_max_iter; ++it) {
    out.iterations = it;
    Eigen::Index worst = 0;
    if (out.lambda.maxCoeff(&worst) <= 1.0 - 1e-3) return out;
    Matrix target;
    try {
      target = linalg::dlyap(closed[static_cast<std::size_t>(worst)], q_eff);
    } catch (const Error&) {
      throw Error(ErrorCode::NoCommonLyapunov,
                  "common_lyapunov: a vertex closed loop is unstable");
    }
    out.P = (1.0 - options.blend_gamma) * out.P + options.blend_gamma * target;
    out.lambda = contraction_factors(closed, out.P);
  }
  throw Error(ErrorCode::NoCommonLyapunov,
              "common_lyapunov: iteration budget exhausted");
}

}  // namespace

const char* to_string(LyapunovMethod method) {
  return method == LyapunovMethod::MinMax ? "minmax" : "blend";
}

Matrix design_gain(const UncertainModel& model, const Vector& theta_nominal,
                   const std::vector<Vector>& vertices) {
  for (const auto& v : vertices) {
    const auto sys = assemble_system(model, v);
    require(linalg::controllability_rank(sys.A, sys.B) == model.nx(),
            ErrorCode::Uncontrollable,
            "design_gain: a vertex model is not reachable");
  }
  const auto sys = assemble_system(model, theta_nominal);
  require(linalg::controllability_rank(sys.A, sys.B) == model.nx(),
          ErrorCode::Uncontrollable, "design_gain: nominal model not reachable");
  const auto res = linalg::dare(sys.A, sys.B, model.Q, model.R);
  require(linalg::spectral_radius(sys.A + sys.B * res.K) < 1.0,
          ErrorCode::RiccatiNonConvergence,
          "design_gain: Riccati gain does not stabilize the nominal model");
  return res.K;
}

double induced_norm(const Matrix& a, const Matrix& P) {
  const auto gm = linalg::generalized_max(a.transpose() * P * a, P);
  return std::sqrt(std::max(gm.value, 0.0));
}

CommonLyapunov common_lyapunov(const UncertainModel& model, const Matrix& K,
                               const std::vector<Vector>& vertices,
                               const DesignOptions& options) {
  require(!vertices.empty(), ErrorCode::InvalidArgument,
          "common_lyapunov: no vertices");
  std::vector<Matrix> closed;
  for (const auto& v : vertices) closed.push_back(closed_loop(model, v, K));
  const Matrix q_eff = model.Q + K.transpose() * model.R * K;

  Vector centroid = Vector::Zero(vertices.front().size());
  for (const auto& v : vertices) centroid += v;
  centroid /= static_cast<double>(vertices.size());
  const Matrix a_nom = closed_loop(model, options.theta_nominal.value_or(centroid), K);
  Matrix start;
  try {
    start = linalg::dlyap(a_nom, q_eff);
  } catch (const Error&) {
    throw Error(ErrorCode::QuadraticStability,
                "common_lyapunov: nominal closed loop is unstable");
  }

  CommonLyapunov out = options.method == LyapunovMethod::MinMax
                           ? minmax_lyapunov(closed, start, options)
                           : blend_lyapunov(closed, start, q_eff, options);
  require(out.lambda.maxCoeff() < 1.0, ErrorCode::NoCommonLyapunov,
          "common_lyapunov: no P with all vertex contraction factors below 1 "
          "(shrink the initial parameter set)");
  return out;
}

double ellipsoid_image_radius(const Matrix& P, const Matrix& M,
                              const Ellipsoid& E) {
  // y = L⁻ᵀ z with ‖z‖ ≤ 1 and P_E = L Lᵀ.
  const Matrix& L = E.cholesky_lower();
  const Matrix my = M * L.transpose().triangularView<Eigen::Upper>().solve(
                            Matrix::Identity(E.dim(), E.dim()));
  const Matrix s = my.transpose() * P * my;
  return std::max(linalg::jacobi_eigen(0.5 * (s + s.transpose())).values.maxCoeff(),
                  0.0);
}

double terminal_radius(const UncertainModel& model, const DesignConstants& d) {
  double r = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < model.X.size(); ++j) {
    const Vector a = model.X.normals.row(j).transpose();
    r = std::min(r, model.X.offsets(j) / (d.P_inv_sqrt * a).norm());
  }
  for (Eigen::Index j = 0; j < model.U.size(); ++j) {
    const Vector c = model.U.normals.row(j).transpose();
    const double room = model.U.offsets(j) - model.S.support(c);
    const double gain = (d.P_inv_sqrt * d.K.transpose() * c).norm();
    if (gain > 0.0)
      r = std::min(r, room / gain);
    else
      require(room >= 0.0, ErrorCode::TerminalSetEmpty,
              "terminal_radius: excitation set violates input constraints");
  }
  require(r > 0.0, ErrorCode::TerminalSetEmpty,
          "terminal_radius: no room inside the constraints");
  const double sw = std::sqrt(d.beta_w);
  for (Eigen::Index j = 0; j < d.lambda.size(); ++j) {
    const double need = d.lambda(j) * r + std::sqrt(d.beta_s(j)) + sw;
    require(d.lambda(j) < 1.0 && need <= r, ErrorCode::TerminalSetEmpty,
            "terminal_radius: robust invariance margin cannot be met");
  }
  return r;
}

TerminalCost terminal_cost(const UncertainModel& model, const Matrix& K,
                           const Vector& theta_hat) {
  const Matrix a = closed_loop(model, theta_hat, K);
  require(linalg::spectral_radius(a) < 1.0, ErrorCode::UnstableClosedLoop,
          "terminal_cost: A_K(theta_hat) is not Schur stable");
  return {linalg::dlyap(a, model.Q + K.transpose() * model.R * K), theta_hat};
}

Matrix uniform_ellipsoid_covariance(const Ellipsoid& E) {
  const auto n = static_cast<double>(E.dim());
  return E.shape().inverse() / (n + 2.0);
}

DesignConstants design(const UncertainModel& model, const ParamPolytope& theta0,
                       const DesignOptions& options) {
  model.validate();
  require(model.W.center().isZero(0.0) && model.S.center().isZero(0.0),
          ErrorCode::InvalidArgument,
          "design: disturbance and excitation sets must be centred at zero");
  DesignConstants d;
  d.vertices = enumerate_vertices(theta0);
  d.theta_nominal = options.theta_nominal.value_or(minmax_center(theta0));
  require(theta0.contains(d.theta_nominal, 1e-9), ErrorCode::InvalidArgument,
          "design: nominal parameter outside the initial set");
  d.K = design_gain(model, d.theta_nominal, d.vertices);
  d.method = options.method;

  if (options.P_override) {
    const Matrix& P = *options.P_override;
    require(P.rows() == model.nx() && P.cols() == model.nx(),
            ErrorCode::DimensionMismatch, "design: P override size");
    require(linalg::is_symmetric(P) && linalg::is_positive_definite(P),
            ErrorCode::NotPositiveDefinite, "design: P override not SPD");
    d.P = P;
    d.lambda.resize(static_cast<Eigen::Index>(d.vertices.size()));
    for (std::size_t j = 0; j < d.vertices.size(); ++j)
      d.lambda(static_cast<Eigen::Index>(j)) =
          induced_norm(closed_loop(model, d.vertices[j], d.K), P);
    require(d.lambda.maxCoeff() < 1.0, ErrorCode::NoCommonLyapunov,
            "design: P override is not a common Lyapunov matrix");
  } else {
    DesignOptions opts = options;
    opts.theta_nominal = d.theta_nominal;
    const auto cl = common_lyapunov(model, d.K, d.vertices, opts);
    d.P = cl.P;
    d.lambda = cl.lambda;
  }
  d.P = 0.5 * (d.P + d.P.transpose());
  d.P_sqrt = linalg::sqrtm_spd(d.P);
  d.P_inv_sqrt = linalg::inv_sqrtm_spd(d.P);

  d.beta_w = ellipsoid_image_radius(d.P, model.F, model.W);
  d.beta_s.resize(static_cast<Eigen::Index>(d.vertices.size()));
  for (std::size_t j = 0; j < d.vertices.size(); ++j)
    d.beta_s(static_cast<Eigen::Index>(j)) = ellipsoid_image_radius(
        d.P, assemble_system(model, d.vertices[j]).B, model.S);
  d.Sigma_s = uniform_ellipsoid_covariance(model.S);
  d.Sigma_w = uniform_ellipsoid_covariance(model.W);
  d.r_T = terminal_radius(model, d);
  return d;
}

}  // namespace atmpc

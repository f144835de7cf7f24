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
#include "atmpc/tube_mpc.hpp"

#include <algorithm>
#include <cmath>

#include "atmpc/error.hpp"

namespace atmpc {

namespace {

void check_spec(const UncertainModel& model, const TubeProblemSpec& spec) {
  require(spec.design != nullptr && spec.terminal != nullptr,
          ErrorCode::InvalidArgument, "tube spec: missing design or terminal cost");
  require(spec.N >= 1, ErrorCode::InvalidArgument, "tube spec: N < 1");
  require(spec.x.size() == model.nx(), ErrorCode::DimensionMismatch, "tube spec: x");
  require(!spec.vertices.empty(), ErrorCode::InvalidArgument, "tube spec: no vertices");
  require(spec.theta_hat.size() == model.p() && spec.theta_bar.size() == model.p(),
          ErrorCode::DimensionMismatch, "tube spec: parameters");
}

std::vector<double> contraction(const UncertainModel& model,
                                const TubeProblemSpec& spec) {
  const DesignConstants& d = *spec.design;
  std::vector<double> lam;
  for (const auto& v : spec.vertices)
    lam.push_back(spec.online_contraction
                      ? induced_norm(closed_loop(model, v, d.K), d.P)
                      : d.lambda.maxCoeff());
  return lam;
}

}  // namespace

AssembledTube assemble(const UncertainModel& model, const TubeProblemSpec& spec) {
  check_spec(model, spec);
  const DesignConstants& d = *spec.design;
  const Eigen::Index nx = model.nx(), nu = model.nu(), N = spec.N;
  AssembledTube out;
  TubeLayout& L = out.layout;
  L.v_offset = 0;
  L.z0_offset = N * nu;
  L.sigma_offset = L.z0_offset + nx;
  const Eigen::Index ny = L.sigma_offset + N + 1;
  ConicProgram prog(ny);

  auto v_sel = [&](Eigen::Index k) {
    Matrix s = Matrix::Zero(nu, ny);
    s.middleCols(L.v_offset + k * nu, nu).setIdentity();
    return s;
  };
  auto sigma_unit = [&](Eigen::Index k) { return Vector::Unit(ny, L.sigma_offset + k); };

  const auto bar = assemble_system(model, spec.theta_bar);
  const Matrix a_bar = bar.A + bar.B * d.K;
  L.Z.resize(static_cast<std::size_t>(N + 1));
  L.Z[0] = Matrix::Zero(nx, ny);
  L.Z[0].middleCols(L.z0_offset, nx).setIdentity();
  for (Eigen::Index k = 0; k < N; ++k)
    L.Z[static_cast<std::size_t>(k + 1)] =
        a_bar * L.Z[static_cast<std::size_t>(k)] + bar.B * v_sel(k);

  const Matrix& Ph = d.P_sqrt;
  // (i) initial tube
  if (spec.pin_initial_tube) {
    for (Eigen::Index i = 0; i < nx; ++i)
      prog.add_equality(Vector::Unit(ny, L.z0_offset + i), spec.x(i));
    prog.add_equality(sigma_unit(0), 0.0);
  } else {
    prog.add_soc({-Ph * L.Z[0], Ph * spec.x, sigma_unit(0), 0.0});
  }
  // (iii) tube recursion per vertex
  const auto lam = contraction(model, spec);
  const double sw = std::sqrt(d.beta_w);
  for (std::size_t j = 0; j < spec.vertices.size(); ++j) {
    const auto sys = assemble_system(model, spec.vertices[j]);
    const Matrix da = sys.A + sys.B * d.K - a_bar;
    const Matrix db = sys.B - bar.B;
    for (Eigen::Index k = 0; k < N; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      prog.add_soc({Ph * (da * L.Z[ks] + db * v_sel(k)), Vector::Zero(nx),
                    sigma_unit(k + 1) - lam[j] * sigma_unit(k), -sw});
    }
  }
  // (iv) state facets and (v) input facets
  for (Eigen::Index k = 0; k <= N; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    for (Eigen::Index j = 0; j < model.X.size(); ++j) {
      const Vector a = model.X.normals.row(j).transpose();
      Vector row = L.Z[ks].transpose() * a;
      row += (d.P_inv_sqrt * a).norm() * sigma_unit(k);
      prog.add_inequality(row, model.X.offsets(j));
    }
    if (k == N) break;
    for (Eigen::Index j = 0; j < model.U.size(); ++j) {
      const Vector c = model.U.normals.row(j).transpose();
      Vector row = (d.K * L.Z[ks] + v_sel(k)).transpose() * c;
      row += (d.P_inv_sqrt * d.K.transpose() * c).norm() * sigma_unit(k);
      prog.add_inequality(row, model.U.offsets(j));
    }
  }
  for (Eigen::Index k = 0; k <= N; ++k) prog.add_inequality(-sigma_unit(k), 0.0);
  // (vi) terminal
  prog.add_soc({Ph * L.Z[static_cast<std::size_t>(N)], Vector::Zero(nx),
                -sigma_unit(N), d.r_T});

  // (vii) cost, as a quadratic in v
  const auto hat = assemble_system(model, spec.theta_hat);
  const Matrix a_hat = hat.A + hat.B * d.K;
  const Eigen::Index nv = N * nu;
  Matrix x_lin = Matrix::Zero(nx, nv);
  Vector x_aff = spec.x;
  Matrix H = Matrix::Zero(nv, nv);
  Vector g = Vector::Zero(nv);
  double constant = 0.0;
  auto accumulate = [&](const Matrix& lin, const Vector& aff, const Matrix& W) {
    H += 2.0 * lin.transpose() * W * lin;
    g += 2.0 * lin.transpose() * (W * aff);
    constant += aff.dot(W * aff);
  };
  for (Eigen::Index k = 0; k < N; ++k) {
    accumulate(x_lin, x_aff, model.Q);
    Matrix u_lin = d.K * x_lin;
    u_lin.middleCols(k * nu, nu) += Matrix::Identity(nu, nu);
    accumulate(u_lin, d.K * x_aff, model.R);
    x_lin = a_hat * x_lin;
    x_lin.middleCols(k * nu, nu) += hat.B;
    x_aff = a_hat * x_aff;
  }
  accumulate(x_lin, x_aff, spec.terminal->P_c);
  H = 0.5 * (H + H.transpose());

  auto epi = min_quadratic_via_epigraph(H, g, prog, L.v_offset);
  out.program = std::move(epi.program);
  L.t_index = epi.t_index;
  for (auto& z : L.Z) z.conservativeResize(Eigen::NoChange, out.program.num_vars());
  for (auto& z : L.Z) z.rightCols(out.program.num_vars() - ny).setZero();
  out.cost_constant = epi.constant - constant;
  return out;
}

TubeSolution solve_mpc(const UncertainModel& model, const TubeProblemSpec& spec,
                       const SolverSettings& settings) {
  const auto tube = assemble(model, spec);
  const auto sol = solve(tube.program, settings);
  TubeSolution out;
  out.status = sol.status;
  out.iterations = sol.iterations;
  if (sol.status != SolveStatus::Optimal) return out;
  const Eigen::Index nx = model.nx(), nu = model.nu(), N = spec.N;
  const auto& L = tube.layout;
  out.v.resize(nu, N);
  for (Eigen::Index k = 0; k < N; ++k)
    out.v.col(k) = sol.y.segment(L.v_offset + k * nu, nu);
  out.z.resize(nx, N + 1);
  for (Eigen::Index k = 0; k <= N; ++k)
    out.z.col(k) = L.Z[static_cast<std::size_t>(k)] * sol.y;
  out.sigma = sol.y.segment(L.sigma_offset, N + 1);
  out.J = evaluate_cost(model, spec.design->K, spec.x, spec.theta_hat, out.v,
                        spec.terminal->P_c);
  return out;
}

double evaluate_cost(const UncertainModel& model, const Matrix& K,
                     const Vector& x, const Vector& theta_hat, const Matrix& v,
                     const Matrix& P_c) {
  const auto sys = assemble_system(model, theta_hat);
  Vector xh = x;
  double J = 0.0;
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const Vector u = K * xh + v.col(k);
    J += xh.dot(model.Q * xh) + u.dot(model.R * u);
    xh = sys.A * xh + sys.B * u;
  }
  return J + xh.dot(P_c * xh);
}

double tube_violation(const UncertainModel& model, const TubeProblemSpec& spec,
                      const Matrix& v, const Matrix& z, const Vector& sigma) {
  check_spec(model, spec);
  const DesignConstants& d = *spec.design;
  const Eigen::Index N = spec.N;
  auto pnorm = [&](const Vector& e) { return (d.P_sqrt * e).norm(); };
  double worst = -std::numeric_limits<double>::infinity();
  auto note = [&](double value) { worst = std::max(worst, value); };

  note(pnorm(spec.x - z.col(0)) - sigma(0));
  const auto bar = assemble_system(model, spec.theta_bar);
  const Matrix a_bar = bar.A + bar.B * d.K;
  const auto lam = contraction(model, spec);
  const double sw = std::sqrt(d.beta_w);
  for (Eigen::Index k = 0; k < N; ++k) {
    note((z.col(k + 1) - a_bar * z.col(k) - bar.B * v.col(k)).cwiseAbs().maxCoeff());
    for (std::size_t j = 0; j < spec.vertices.size(); ++j) {
      const auto sys = assemble_system(model, spec.vertices[j]);
      const Vector r = (sys.A + sys.B * d.K) * z.col(k) + sys.B * v.col(k) - z.col(k + 1);
      note(lam[j] * sigma(k) + sw + pnorm(r) - sigma(k + 1));
    }
  }
  for (Eigen::Index k = 0; k <= N; ++k) {
    note(-sigma(k));
    for (Eigen::Index j = 0; j < model.X.size(); ++j) {
      const Vector a = model.X.normals.row(j).transpose();
      note(a.dot(z.col(k)) + sigma(k) * (d.P_inv_sqrt * a).norm() - model.X.offsets(j));
    }
    if (k == N) break;
    for (Eigen::Index j = 0; j < model.U.size(); ++j) {
      const Vector c = model.U.normals.row(j).transpose();
      note(c.dot(d.K * z.col(k) + v.col(k)) +
           sigma(k) * (d.P_inv_sqrt * d.K.transpose() * c).norm() - model.U.offsets(j));
    }
  }
  note(pnorm(z.col(N)) + sigma(N) - d.r_T);
  return worst;
}

}  // namespace atmpc

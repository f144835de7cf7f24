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
#include "atmpc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "atmpc/error.hpp"
#include "atmpc/random.hpp"

namespace atmpc {

bool ParamPolytope::contains(const Vector& theta, double tol) const {
  require(theta.size() == dim(), ErrorCode::DimensionMismatch,
          "ParamPolytope::contains");
  return ((Pi * theta - mu).array() <= tol).all();
}

bool ParamPolytope::is_box() const {
  const Eigen::Index p = dim();
  if (facets() != 2 * p) return false;
  const Matrix expected =
      (Matrix(2 * p, p) << Matrix::Identity(p, p), -Matrix::Identity(p, p))
          .finished();
  return Pi == expected;
}

ParamPolytope ParamPolytope::box(const Vector& lower, const Vector& upper) {
  require(lower.size() == upper.size(), ErrorCode::DimensionMismatch,
          "ParamPolytope::box");
  require(((upper - lower).array() >= 0.0).all(), ErrorCode::EmptySet,
          "ParamPolytope::box: lower > upper");
  const Eigen::Index p = lower.size();
  ParamPolytope set;
  set.Pi.resize(2 * p, p);
  set.Pi << Matrix::Identity(p, p), -Matrix::Identity(p, p);
  set.mu.resize(2 * p);
  set.mu << upper, -lower;
  return set;
}

TransitionRecord make_record(const UncertainModel& model, const Vector& x_prev,
                             const Vector& u_prev, const Vector& x_next) {
  require(x_next.size() == model.nx(), ErrorCode::DimensionMismatch,
          "make_record: x_next");
  return {x_prev, u_prev, x_next, build_regressor(model, x_prev, u_prev)};
}

SupportUpdate support_update(const ParamPolytope& prev,
                             const std::vector<TransitionRecord>& window,
                             const UncertainModel& model,
                             const EstimatorSettings& settings) {
  SupportUpdate out{prev.mu, 0};
  if (window.empty()) return out;
  const Eigen::Index p = prev.dim();
  require(p == model.p(), ErrorCode::DimensionMismatch, "support_update: p");

  // w = F⁺ r and ‖Lᵀ(w − c)‖ ≤ 1 with P_w = L Lᵀ.
  const Eigen::ColPivHouseholderQR<Matrix> qr(model.F);
  const Matrix f_pinv =
      model.F.completeOrthogonalDecomposition().pseudoInverse();
  const Matrix to_w = model.W.cholesky_lower().transpose() * f_pinv;
  const Vector w_shift = model.W.cholesky_lower().transpose() * model.W.center();
  Matrix complement;
  if (settings.mode == ResidualMode::Exact && model.nw() < model.nx()) {
    const Matrix q = qr.householderQ();
    complement = q.rightCols(model.nx() - model.nw());
  }

  ConicProgram base(p);
  for (Eigen::Index j = 0; j < prev.facets(); ++j)
    base.add_inequality(prev.Pi.row(j).transpose(), prev.mu(j));
  for (const auto& rec : window) {
    const Vector r0 = rec.x_next - rec.regressor.phi;  // r = r0 − Φθ
    SocConstraint cone;
    cone.C = -to_w * rec.regressor.Phi;
    cone.d = to_w * r0 - w_shift;
    cone.e = Vector::Zero(p);
    cone.f = 1.0;
    base.add_soc(std::move(cone));
    for (Eigen::Index i = 0; i < complement.cols(); ++i) {
      const Vector n = complement.col(i);
      const Vector row = rec.regressor.Phi.transpose() * n;
      const double val = n.dot(r0);
      base.add_inequality(-row, settings.exact_tol - val);
      base.add_inequality(row, settings.exact_tol + val);
    }
  }

  for (Eigen::Index j = 0; j < prev.facets(); ++j) {
    ConicProgram prog = base;
    prog.c = -prev.Pi.row(j).transpose();
    const auto sol = solve(prog, settings.solver);
    switch (sol.status) {
      case SolveStatus::Optimal: {
        const double bound = std::max(-sol.objective, -sol.dual_objective);
        out.mu(j) = std::min(prev.mu(j), bound);
        break;
      }
      case SolveStatus::Infeasible:
        throw Error(ErrorCode::EmptyIntersection,
                    "support_update: data contradict the parameter set");
      default:
        ++out.solver_failures;
        break;
    }
  }
  return out;
}

Vector project_nominal(const Vector& theta_prev, const ParamPolytope& set,
                       const SolverSettings& solver) {
  require(theta_prev.size() == set.dim(), ErrorCode::DimensionMismatch,
          "project_nominal");
  if (set.contains(theta_prev)) return theta_prev;
  const Eigen::Index p = set.dim();
  if (set.is_box()) {
    require(((set.mu.head(p) + set.mu.tail(p)).array() >= 0.0).all(),
            ErrorCode::EmptySet, "project_nominal: empty box");
    return theta_prev.cwiseMin(set.mu.head(p)).cwiseMax(-set.mu.tail(p));
  }
  ConicProgram prog(p + 1);
  prog.c(p) = 1.0;
  for (Eigen::Index j = 0; j < set.facets(); ++j) {
    Vector row = Vector::Zero(p + 1);
    row.head(p) = set.Pi.row(j).transpose();
    prog.add_inequality(row, set.mu(j));
  }
  SocConstraint cone;
  cone.C = Matrix::Zero(p, p + 1);
  cone.C.leftCols(p).setIdentity();
  cone.d = -theta_prev;
  cone.e = Vector::Unit(p + 1, p);
  prog.add_soc(std::move(cone));
  const auto sol = solve(prog, solver);
  require(sol.status != SolveStatus::Infeasible, ErrorCode::EmptySet,
          "project_nominal: empty set");
  require(sol.status == SolveStatus::Optimal, ErrorCode::SolverFailure,
          "project_nominal: solver failure");
  return sol.y.head(p);
}

std::vector<Vector> enumerate_vertices(const ParamPolytope& set, double tol) {
  const Eigen::Index p = set.dim();
  const Eigen::Index m = set.facets();
  std::vector<Vector> out;
  if (set.is_box()) {
    const Vector upper = set.mu.head(p);
    const Vector lower = -set.mu.tail(p);
    require(((upper - lower).array() >= -tol).all(), ErrorCode::EmptySet,
            "enumerate_vertices: empty box");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
      Vector v(p);
      for (Eigen::Index i = 0; i < p; ++i)
        v(i) = (mask >> i) & 1U ? upper(i) : lower(i);
      out.push_back(std::move(v));
    }
    return out;
  }
  require(m >= p, ErrorCode::VertexEnumeration,
          "enumerate_vertices: fewer facets than dimensions");
  std::vector<bool> pick(static_cast<std::size_t>(m), false);
  std::fill(pick.begin(), pick.begin() + p, true);
  const double scale = 1.0 + set.mu.cwiseAbs().maxCoeff();
  do {
    Matrix a(p, p);
    Vector b(p);
    Eigen::Index r = 0;
    for (Eigen::Index j = 0; j < m; ++j)
      if (pick[static_cast<std::size_t>(j)]) {
        a.row(r) = set.Pi.row(j);
        b(r) = set.mu(j);
        ++r;
      }
    Eigen::FullPivLU<Matrix> lu(a);
    if (lu.rank() < p) continue;
    const Vector v = lu.solve(b);
    if (!set.contains(v, tol * scale)) continue;
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Vector& u) {
      return (u - v).cwiseAbs().maxCoeff() <= 10.0 * tol * scale;
    });
    if (!duplicate) out.push_back(v);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  require(!out.empty(), ErrorCode::VertexEnumeration,
          "enumerate_vertices: no vertices (empty or unbounded set)");
  return out;
}

Vector minmax_center(const ParamPolytope& set, const SolverSettings& solver) {
  const Eigen::Index p = set.dim();
  if (set.is_box()) return 0.5 * (set.mu.head(p) - set.mu.tail(p));
  const auto vertices = enumerate_vertices(set);
  ConicProgram prog(p + 1);
  prog.c(p) = 1.0;
  for (const auto& v : vertices) {
    SocConstraint cone;
    cone.C = Matrix::Zero(p, p + 1);
    cone.C.leftCols(p).setIdentity();
    cone.d = -v;
    cone.e = Vector::Unit(p + 1, p);
    prog.add_soc(std::move(cone));
  }
  const auto sol = solve(prog, solver);
  require(sol.status == SolveStatus::Optimal, ErrorCode::SolverFailure,
          "minmax_center: solver failure");
  return sol.y.head(p);
}

namespace {

double polygon_area(const std::vector<Vector>& pts) {
  // pts are 2-D; sort by angle around the mean and apply the shoelace rule.
  if (pts.size() < 3) return 0.0;
  Vector c = Vector::Zero(2);
  for (const auto& q : pts) c += q;
  c /= static_cast<double>(pts.size());
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::atan2(pts[a](1) - c(1), pts[a](0) - c(0)) <
           std::atan2(pts[b](1) - c(1), pts[b](0) - c(0));
  });
  double twice = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const Vector& a = pts[idx[k]];
    const Vector& b = pts[idx[(k + 1) % idx.size()]];
    twice += a(0) * b(1) - a(1) * b(0);
  }
  return 0.5 * std::abs(twice);
}

}  // namespace

double polytope_volume(const ParamPolytope& set, std::uint64_t mc_seed,
                       std::int64_t mc_samples) {
  const Eigen::Index p = set.dim();
  if (set.is_box())
    return (set.mu.head(p) + set.mu.tail(p)).cwiseMax(0.0).prod();
  const auto vertices = enumerate_vertices(set);
  if (p == 1) {
    double lo = vertices.front()(0), hi = lo;
    for (const auto& v : vertices) {
      lo = std::min(lo, v(0));
      hi = std::max(hi, v(0));
    }
    return hi - lo;
  }
  if (p == 2) {
    return polygon_area(vertices);
  }
  if (p == 3) {
    Vector c = Vector::Zero(3);
    for (const auto& v : vertices) c += v;
    c /= static_cast<double>(vertices.size());
    const double tol = 1e-9 * (1.0 + set.mu.cwiseAbs().maxCoeff());
    double volume = 0.0;
    for (Eigen::Index j = 0; j < set.facets(); ++j) {
      const Vector n = set.Pi.row(j).transpose();
      const double nn = n.norm();
      std::vector<Vector> face;
      for (const auto& v : vertices)
        if (std::abs(n.dot(v) - set.mu(j)) <= tol * nn) face.push_back(v);
      if (face.size() < 3) continue;
      // Orthonormal basis of the facet plane.
      const Vector unit = n / nn;
      Vector seed = Vector::Unit(3, 0);
      if (std::abs(unit(0)) > 0.9) seed = Vector::Unit(3, 1);
      const Vector e1 = (seed - seed.dot(unit) * unit).normalized();
      const Vector e2 = Eigen::Vector3d(unit).cross(Eigen::Vector3d(e1));
      std::vector<Vector> planar;
      for (const auto& v : face) planar.push_back((Vector(2) << e1.dot(v), e2.dot(v)).finished());
      const double height = (set.mu(j) - n.dot(c)) / nn;
      volume += polygon_area(planar) * height / 3.0;
    }
    return volume;
  }
  Vector lower = vertices.front(), upper = vertices.front();
  for (const auto& v : vertices) {
    lower = lower.cwiseMin(v);
    upper = upper.cwiseMax(v);
  }
  Rng rng(mc_seed);
  std::int64_t hits = 0;
  Vector theta(p);
  for (std::int64_t k = 0; k < mc_samples; ++k) {
    for (Eigen::Index i = 0; i < p; ++i)
      theta(i) = lower(i) + (upper(i) - lower(i)) * uniform01(rng);
    if (set.contains(theta)) ++hits;
  }
  return (upper - lower).prod() * static_cast<double>(hits) /
         static_cast<double>(mc_samples);
}

}  // namespace atmpc

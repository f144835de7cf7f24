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
#include "atmpc/conic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "atmpc/error.hpp"

namespace atmpc {

ConicProgram::ConicProgram(Eigen::Index num_vars)
    : c(Vector::Zero(num_vars)),
      A_eq(0, num_vars),
      b_eq(0),
      A_in(0, num_vars),
      b_in(0) {}

void ConicProgram::add_equality(const Vector& row, double rhs) {
  require(row.size() == num_vars(), ErrorCode::DimensionMismatch,
          "add_equality");
  A_eq.conservativeResize(A_eq.rows() + 1, num_vars());
  A_eq.row(A_eq.rows() - 1) = row.transpose();
  b_eq.conservativeResize(b_eq.size() + 1);
  b_eq(b_eq.size() - 1) = rhs;
}

void ConicProgram::add_inequality(const Vector& row, double rhs) {
  require(row.size() == num_vars(), ErrorCode::DimensionMismatch,
          "add_inequality");
  A_in.conservativeResize(A_in.rows() + 1, num_vars());
  A_in.row(A_in.rows() - 1) = row.transpose();
  b_in.conservativeResize(b_in.size() + 1);
  b_in(b_in.size() - 1) = rhs;
}

void ConicProgram::add_soc(SocConstraint cone) {
  require(cone.C.cols() == num_vars() && cone.e.size() == num_vars() &&
              cone.d.size() == cone.C.rows(),
          ErrorCode::DimensionMismatch, "add_soc");
  soc.push_back(std::move(cone));
}

Eigen::Index ConicProgram::add_variables(Eigen::Index count) {
  const Eigen::Index first = num_vars();
  const Eigen::Index n = first + count;
  c.conservativeResize(n);
  c.tail(count).setZero();
  A_eq.conservativeResize(A_eq.rows(), n);
  A_eq.rightCols(count).setZero();
  A_in.conservativeResize(A_in.rows(), n);
  A_in.rightCols(count).setZero();
  for (auto& cone : soc) {
    cone.C.conservativeResize(cone.C.rows(), n);
    cone.C.rightCols(count).setZero();
    cone.e.conservativeResize(n);
    cone.e.tail(count).setZero();
  }
  return first;
}

void ConicProgram::validate() const {
  const Eigen::Index n = num_vars();
  require(n > 0, ErrorCode::DimensionMismatch, "program has no variables");
  require(A_eq.cols() == n && A_eq.rows() == b_eq.size(),
          ErrorCode::DimensionMismatch, "equality block");
  require(A_in.cols() == n && A_in.rows() == b_in.size(),
          ErrorCode::DimensionMismatch, "inequality block");
  for (const auto& cone : soc)
    require(cone.C.cols() == n && cone.e.size() == n &&
                cone.d.size() == cone.C.rows(),
            ErrorCode::DimensionMismatch, "SOC block");
  require(A_in.rows() > 0 || !soc.empty(), ErrorCode::InvalidArgument,
          "program needs at least one inequality or cone constraint");
}

double ConicProgram::max_violation(const Vector& y) const {
  double worst = 0.0;
  if (A_eq.rows() > 0)
    worst = std::max(worst, (A_eq * y - b_eq).cwiseAbs().maxCoeff());
  if (A_in.rows() > 0)
    worst = std::max(worst, (A_in * y - b_in).maxCoeff());
  for (const auto& cone : soc)
    worst = std::max(worst, (cone.C * y + cone.d).norm() -
                                (cone.e.dot(y) + cone.f));
  return worst;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cone K = R₊^l × Q^{q_1} × … × Q^{q_k}; rows of G/h follow that order.
struct Cones {
  Eigen::Index l = 0;
  std::vector<Eigen::Index> q;
  std::vector<Eigen::Index> q_start;
  Eigen::Index m = 0;

  [[nodiscard]] Eigen::Index degree() const {
    return l + static_cast<Eigen::Index>(q.size());
  }
};

Vector identity(const Cones& k) {
  Vector e = Vector::Zero(k.m);
  e.head(k.l).setOnes();
  for (Eigen::Index s : k.q_start) e(s) = 1.0;
  return e;
}

// u ∘ v
Vector jordan_product(const Cones& k, const Vector& u, const Vector& v) {
  Vector out(k.m);
  out.head(k.l) = u.head(k.l).cwiseProduct(v.head(k.l));
  for (std::size_t i = 0; i < k.q.size(); ++i) {
    const Eigen::Index s = k.q_start[i];
    const Eigen::Index n = k.q[i];
    out(s) = u.segment(s, n).dot(v.segment(s, n));
    out.segment(s + 1, n - 1) =
        u(s) * v.segment(s + 1, n - 1) + v(s) * u.segment(s + 1, n - 1);
  }
  return out;
}

// x with λ ∘ x = d
Vector jordan_divide(const Cones& k, const Vector& lambda, const Vector& d) {
  Vector out(k.m);
  out.head(k.l) = d.head(k.l).cwiseQuotient(lambda.head(k.l));
  for (std::size_t i = 0; i < k.q.size(); ++i) {
    const Eigen::Index s = k.q_start[i];
    const Eigen::Index n = k.q[i];
    const double l0 = lambda(s);
    const auto l1 = lambda.segment(s + 1, n - 1);
    const double det = l0 * l0 - l1.squaredNorm();
    const double x0 = (l0 * d(s) - l1.dot(d.segment(s + 1, n - 1))) / det;
    out(s) = x0;
    out.segment(s + 1, n - 1) = (d.segment(s + 1, n - 1) - x0 * l1) / l0;
  }
  return out;
}

// Smallest α ≥ 0 with u + α d on the cone boundary (u interior).
double max_step(const Cones& k, const Vector& u, const Vector& d) {
  double alpha = kInf;
  for (Eigen::Index i = 0; i < k.l; ++i)
    if (d(i) < 0.0) alpha = std::min(alpha, -u(i) / d(i));
  for (std::size_t i = 0; i < k.q.size(); ++i) {
    const Eigen::Index s = k.q_start[i];
    const Eigen::Index n = k.q[i];
    const auto u1 = u.segment(s + 1, n - 1);
    const auto d1 = d.segment(s + 1, n - 1);
    const double a = d(s) * d(s) - d1.squaredNorm();
    const double b = 2.0 * (u(s) * d(s) - u1.dot(d1));
    const double c = u(s) * u(s) - u1.squaredNorm();
    double root = kInf;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (std::abs(a) <= 1e-14 * scale) {
      if (b < 0.0) root = -c / b;
    } else {
      const double disc = b * b - 4.0 * a * c;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));
        for (double r : {qq / a, qq != 0.0 ? c / qq : kInf})
          if (r > 0.0) root = std::min(root, r);
      }
    }
    // Leaving through the apex region without crossing q = 0 is impossible
    // from the interior, but guard the linear condition anyway.
    if (d(s) < 0.0) root = std::min(root, -u(s) / d(s));
    alpha = std::min(alpha, root);
  }
  return alpha;
}

// Moves v into the interior: v + (1 + a) e when a = max(−min eigenvalue) ≥ 0.
void shift_into_cone(const Cones& k, Vector& v) {
  double a = -kInf;
  for (Eigen::Index i = 0; i < k.l; ++i) a = std::max(a, -v(i));
  for (std::size_t i = 0; i < k.q.size(); ++i) {
    const Eigen::Index s = k.q_start[i];
    a = std::max(a, v.segment(s + 1, k.q[i] - 1).norm() - v(s));
  }
  if (a >= 0.0) v += (1.0 + a) * identity(k);
}

// Nesterov-Todd scaling W with W z = W⁻¹ s = λ. W is block diagonal and
// symmetric; SOC blocks are stored densely.
struct Scaling {
  Vector lp;  // sqrt(s/z)
  std::vector<Matrix> W;
  std::vector<Matrix> W_inv;
  Vector lambda;

  void compute(const Cones& k, const Vector& s, const Vector& z) {
    lp = (s.head(k.l).array() / z.head(k.l).array()).sqrt();
    W.resize(k.q.size());
    W_inv.resize(k.q.size());
    for (std::size_t i = 0; i < k.q.size(); ++i) {
      const Eigen::Index st = k.q_start[i];
      const Eigen::Index n = k.q[i];
      const Vector si = s.segment(st, n);
      const Vector zi = z.segment(st, n);
      const double sn =
          std::sqrt(si(0) * si(0) - si.tail(n - 1).squaredNorm());
      const double zn =
          std::sqrt(zi(0) * zi(0) - zi.tail(n - 1).squaredNorm());
      const Vector sb = si / sn;
      const Vector zb = zi / zn;
      const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
      Vector wb(n);
      wb(0) = (sb(0) + zb(0)) / (2.0 * gamma);
      wb.tail(n - 1) = (sb.tail(n - 1) - zb.tail(n - 1)) / (2.0 * gamma);
      const double eta = std::sqrt(sn / zn);
      Matrix h(n, n);
      h(0, 0) = wb(0);
      h.block(0, 1, 1, n - 1) = wb.tail(n - 1).transpose();
      h.block(1, 0, n - 1, 1) = wb.tail(n - 1);
      h.block(1, 1, n - 1, n - 1) =
          Matrix::Identity(n - 1, n - 1) +
          wb.tail(n - 1) * wb.tail(n - 1).transpose() / (1.0 + wb(0));
      W[i] = eta * h;
      h.block(0, 1, 1, n - 1) *= -1.0;
      h.block(1, 0, n - 1, 1) *= -1.0;
      W_inv[i] = h / eta;
    }
    lambda = apply(k, z);
  }

  [[nodiscard]] Vector apply(const Cones& k, const Vector& v) const {
    Vector out(k.m);
    out.head(k.l) = lp.cwiseProduct(v.head(k.l));
    for (std::size_t i = 0; i < k.q.size(); ++i)
      out.segment(k.q_start[i], k.q[i]) =
          W[i] * v.segment(k.q_start[i], k.q[i]);
    return out;
  }

  [[nodiscard]] Vector apply_inv(const Cones& k, const Vector& v) const {
    Vector out(k.m);
    out.head(k.l) = v.head(k.l).cwiseQuotient(lp);
    for (std::size_t i = 0; i < k.q.size(); ++i)
      out.segment(k.q_start[i], k.q[i]) =
          W_inv[i] * v.segment(k.q_start[i], k.q[i]);
    return out;
  }

  [[nodiscard]] Matrix apply_inv_rows(const Cones& k, const Matrix& g) const {
    Matrix out(g.rows(), g.cols());
    out.topRows(k.l) = lp.cwiseInverse().asDiagonal() * g.topRows(k.l);
    for (std::size_t i = 0; i < k.q.size(); ++i)
      out.middleRows(k.q_start[i], k.q[i]).noalias() =
          W_inv[i] * g.middleRows(k.q_start[i], k.q[i]);
    return out;
  }
};

// Solves [0 Aᵀ Gᵀ; A 0 0; G 0 −W²] (x, y, z) = (bx, by, bz).
class KktSolver {
 public:
  KktSolver(const Matrix& G, const Matrix& A, const Cones& k)
      : G_(G), A_(A), k_(k) {}

  void factor(const Scaling& w) {
    w_ = &w;
    Gs_ = w.apply_inv_rows(k_, G_);
    const Eigen::Index n = G_.cols();
    const Eigen::Index p = A_.rows();
    Matrix H = Matrix::Zero(n, n);
    H.selfadjointView<Eigen::Lower>().rankUpdate(Gs_.transpose());
    H.triangularView<Eigen::StrictlyUpper>() = H.transpose();
    const double reg = 1e-13 * std::max(1.0, H.diagonal().maxCoeff());
    if (p == 0) {
      H.diagonal().array() += reg;
      llt_.compute(H);
      use_llt_ = llt_.info() == Eigen::Success;
      if (use_llt_) return;
    }
    Matrix kkt = Matrix::Zero(n + p, n + p);
    kkt.topLeftCorner(n, n) = H;
    kkt.topLeftCorner(n, n).diagonal().array() += reg;
    kkt.topRightCorner(n, p) = A_.transpose();
    kkt.bottomLeftCorner(p, n) = A_;
    kkt.bottomRightCorner(p, p).diagonal().array() -= reg;
    lu_.compute(kkt);
    use_llt_ = false;
  }

  void solve(const Vector& bx, const Vector& by, const Vector& bz, Vector& x,
             Vector& y, Vector& z) const {
    solve_reduced(bx, by, bz, x, y, z);
    // Iterative refinement against the unreduced system.
    for (int pass = 0; pass < 2; ++pass) {
      const Vector rx = bx - A_.transpose() * y - G_.transpose() * z;
      const Vector ry = by - A_ * x;
      const Vector rz = bz - G_ * x + w_->apply(k_, w_->apply(k_, z));
      const double res = std::max({rx.cwiseAbs().maxCoeff(),
                                   ry.size() ? ry.cwiseAbs().maxCoeff() : 0.0,
                                   rz.cwiseAbs().maxCoeff()});
      if (res == 0.0) break;
      Vector dx, dy, dz;
      solve_reduced(rx, ry, rz, dx, dy, dz);
      x += dx;
      y += dy;
      z += dz;
    }
  }

 private:
  void solve_reduced(const Vector& bx, const Vector& by, const Vector& bz,
                     Vector& x, Vector& y, Vector& z) const {
    const Eigen::Index n = G_.cols();
    const Eigen::Index p = A_.rows();
    const Vector winv_bz = w_->apply_inv(k_, bz);
    const Vector r1 = bx + Gs_.transpose() * winv_bz;
    if (use_llt_) {
      x = llt_.solve(r1);
      y = Vector::Zero(0);
    } else {
      Vector rhs(n + p);
      rhs << r1, by;
      const Vector sol = lu_.solve(rhs);
      x = sol.head(n);
      y = sol.tail(p);
    }
    z = w_->apply_inv(k_, Gs_ * x - winv_bz);
  }

  const Matrix& G_;
  const Matrix& A_;
  const Cones& k_;
  const Scaling* w_ = nullptr;
  Matrix Gs_;
  Eigen::LLT<Matrix> llt_;
  Eigen::PartialPivLU<Matrix> lu_;
  bool use_llt_ = false;
};

double safe_norm(const Vector& v) { return v.size() ? v.norm() : 0.0; }

}  // namespace

ConicSolution solve(const ConicProgram& prog, const SolverSettings& settings) {
  prog.validate();
  const Eigen::Index n = prog.num_vars();
  const Eigen::Index p = prog.A_eq.rows();

  Cones k;
  k.l = prog.A_in.rows();
  k.m = k.l;
  for (const auto& cone : prog.soc) {
    k.q_start.push_back(k.m);
    k.q.push_back(cone.C.rows() + 1);
    k.m += cone.C.rows() + 1;
  }
  Matrix G(k.m, n);
  Vector h(k.m);
  G.topRows(k.l) = prog.A_in;
  h.head(k.l) = prog.b_in;
  for (std::size_t i = 0; i < prog.soc.size(); ++i) {
    const auto& cone = prog.soc[i];
    const Eigen::Index s = k.q_start[i];
    G.row(s) = -cone.e.transpose();
    h(s) = cone.f;
    G.middleRows(s + 1, cone.C.rows()) = -cone.C;
    h.segment(s + 1, cone.C.rows()) = cone.d;
  }
  const Matrix& A = prog.A_eq;
  const Vector& b = prog.b_eq;
  const Vector& c = prog.c;

  const double resx0 = std::max(1.0, safe_norm(c));
  const double resy0 = std::max(1.0, safe_norm(b));
  const double resz0 = std::max(1.0, safe_norm(h));
  const double degree = static_cast<double>(k.degree());

  ConicSolution out;
  KktSolver kkt(G, A, k);

  // Starting point: least-norm primal/dual solutions shifted into the cone.
  Scaling w;
  w.compute(k, identity(k), identity(k));
  kkt.factor(w);
  Vector x, y, z, s, dummy_x, dummy_y;
  kkt.solve(Vector::Zero(n), b, h, x, y, z);
  s = -z;
  shift_into_cone(k, s);
  kkt.solve(-c, Vector::Zero(p), Vector::Zero(k.m), dummy_x, y, z);
  shift_into_cone(k, z);
  double tau = 1.0;
  double kappa = 1.0;

  const Vector e = identity(k);

  for (int iter = 0; iter <= settings.max_iter; ++iter) {
    out.iterations = iter;
    const Vector hrx = A.transpose() * y + G.transpose() * z;
    const Vector hry = A * x;
    const Vector hrz = G * x + s;
    const Vector rx = hrx + c * tau;
    const Vector ry = hry - b * tau;
    const Vector rz = hrz - h * tau;
    const double cx = c.dot(x);
    const double by_hz = b.dot(y) + h.dot(z);
    const double rt = cx + by_hz + kappa;
    const double gap = s.dot(z);
    const double mu = (gap + tau * kappa) / (degree + 1.0);

    const double pcost = cx / tau;
    const double dcost = -by_hz / tau;
    const double pres = std::max(safe_norm(ry) / resy0, safe_norm(rz) / resz0) / tau;
    const double dres = safe_norm(rx) / resx0 / tau;
    const double relgap = (gap / (tau * tau)) / std::max(1.0, std::abs(pcost));

    out.primal_residual = pres;
    out.dual_residual = dres;
    out.gap = gap / (tau * tau);

    if (pres <= settings.tol_feas && dres <= settings.tol_feas &&
        relgap <= settings.tol_gap) {
      out.status = SolveStatus::Optimal;
      out.y = x / tau;
      out.objective = pcost;
      out.dual_objective = dcost;
      return out;
    }
    if (by_hz < 0.0) {
      const double pinf = safe_norm(hrx) / resx0 / (-by_hz);
      if (pinf <= settings.tol_feas) {
        out.status = SolveStatus::Infeasible;
        out.y = x / tau;
        out.objective = kInf;
        return out;
      }
    }
    if (cx < 0.0) {
      const double dinf =
          std::max(safe_norm(hry) / resy0, safe_norm(hrz) / resz0) / (-cx);
      if (dinf <= settings.tol_feas) {
        out.status = SolveStatus::Unbounded;
        out.y = x / tau;
        out.objective = -kInf;
        return out;
      }
    }
    if (iter == settings.max_iter) break;

    w.compute(k, s, z);
    if (!w.lambda.allFinite()) break;
    kkt.factor(w);
    Vector x1, y1, z1;
    kkt.solve(-c, b, h, x1, y1, z1);
    const double denom = -w.apply(k, z1).squaredNorm() - kappa / tau;

    const Vector lambda_sq = jordan_product(k, w.lambda, w.lambda);

    auto direction = [&](double sigma, const Vector& ds, double dk,
                         Vector& dx, Vector& dy, Vector& dz, Vector& dsv,
                         double& dtau, double& dkap) {
      const double eta = 1.0 - sigma;
      const Vector lam_ds = jordan_divide(k, w.lambda, ds);
      Vector x2, y2, z2;
      kkt.solve(-eta * rx, -eta * ry, -eta * rz - w.apply(k, lam_ds), x2, y2,
                z2);
      const double rhs_t = -eta * rt - dk / tau;
      dtau = (rhs_t - c.dot(x2) - b.dot(y2) - h.dot(z2)) / denom;
      dx = x2 + dtau * x1;
      dy = y2 + dtau * y1;
      dz = z2 + dtau * z1;
      dsv = w.apply(k, lam_ds - w.apply(k, dz));
      dkap = (dk - kappa * dtau) / tau;
    };

    auto step_length = [&](const Vector& dsv, const Vector& dz, double dtau,
                           double dkap) {
      double a = std::min(max_step(k, s, dsv), max_step(k, z, dz));
      if (dtau < 0.0) a = std::min(a, -tau / dtau);
      if (dkap < 0.0) a = std::min(a, -kappa / dkap);
      return a;
    };

    // Predictor.
    Vector dx_a, dy_a, dz_a, ds_a;
    double dtau_a = 0.0, dkap_a = 0.0;
    direction(0.0, -lambda_sq, -tau * kappa, dx_a, dy_a, dz_a, ds_a, dtau_a,
              dkap_a);
    const double alpha_a = std::min(1.0, step_length(ds_a, dz_a, dtau_a, dkap_a));
    const double sigma = std::pow(1.0 - alpha_a, 3);

    // Corrector.
    const Vector corr =
        jordan_product(k, w.apply_inv(k, ds_a), w.apply(k, dz_a));
    Vector dx, dy, dz, dsv;
    double dtau = 0.0, dkap = 0.0;
    direction(sigma, -lambda_sq - corr + sigma * mu * e,
              -tau * kappa - dtau_a * dkap_a + sigma * mu, dx, dy, dz, dsv,
              dtau, dkap);
    const double alpha = std::min(1.0, 0.99 * step_length(dsv, dz, dtau, dkap));
    if (!(alpha > 1e-12) || !dx.allFinite()) break;

    x += alpha * dx;
    y += alpha * dy;
    z += alpha * dz;
    s += alpha * dsv;
    tau += alpha * dtau;
    kappa += alpha * dkap;
  }

  out.status = SolveStatus::NumericalFailure;
  out.y = x / tau;
  out.objective = c.dot(out.y);
  return out;
}

EpigraphProgram min_quadratic_via_epigraph(const Matrix& H, const Vector& g,
                                           const ConicProgram& prog,
                                           Eigen::Index offset) {
  const Eigen::Index dim = H.rows();
  require(H.cols() == dim && g.size() == dim && offset >= 0 &&
              offset + dim <= prog.num_vars(),
          ErrorCode::DimensionMismatch, "min_quadratic_via_epigraph");
  require(linalg::is_symmetric(H, 1e-9), ErrorCode::NotPositiveDefinite,
          "H must be symmetric");

  // Fold the program's linear cost into g; it must then act only on the
  // block covered by H.
  Vector g_total = g + prog.c.segment(offset, dim);
  Vector rest = prog.c;
  rest.segment(offset, dim).setZero();
  require(rest.isZero(0.0), ErrorCode::InvalidArgument,
          "linear cost outside the quadratic block");

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H + H.transpose()));
  const Vector& ev = es.eigenvalues();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  require(ev.minCoeff() >= -1e-10 * top, ErrorCode::NotPositiveDefinite,
          "H is not positive semidefinite");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < dim; ++i)
    if (ev(i) > 1e-12 * top) keep.push_back(i);
  const auto r = static_cast<Eigen::Index>(keep.size());
  Matrix L(r, dim);
  Vector shift(r);
  Matrix basis(dim, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    const Eigen::Index i = keep[static_cast<std::size_t>(j)];
    const Vector v = es.eigenvectors().col(i);
    basis.col(j) = v;
    L.row(j) = std::sqrt(ev(i)) * v.transpose();
    shift(j) = v.dot(g_total) / std::sqrt(ev(i));
  }
  const Vector outside = g_total - basis * (basis.transpose() * g_total);
  require(outside.norm() <= 1e-9 * std::max(1.0, g_total.norm()),
          ErrorCode::Unbounded,
          "linear term outside the range of H (quadratic unbounded below)");

  EpigraphProgram out;
  out.program = prog;
  out.program.c.setZero();
  out.t_index = out.program.add_variables(1);
  SocConstraint cone;
  cone.C = Matrix::Zero(r, out.program.num_vars());
  cone.C.middleCols(offset, dim) = L;
  cone.d = shift;
  cone.e = Vector::Zero(out.program.num_vars());
  cone.e(out.t_index) = 1.0;
  cone.f = 0.0;
  out.program.add_soc(std::move(cone));
  out.program.c(out.t_index) = 1.0;
  out.constant = 0.5 * shift.squaredNorm();
  return out;
}

}  // namespace atmpc

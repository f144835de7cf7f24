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
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "atmpc/benchmark.hpp"
#include "atmpc/design.hpp"
#include "atmpc/error.hpp"
#include "atmpc/linalg.hpp"
#include "atmpc/random.hpp"

using namespace atmpc;

namespace {

UncertainModel scalar_model(double a, double b) {
  UncertainModel m;
  m.A_basis = {Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, 0.01)};
  m.B_basis = {Matrix::Constant(1, 1, b), Matrix::Zero(1, 1)};
  m.F = Matrix::Constant(1, 1, 1.0);
  m.X = HalfspaceSet::box(1, 1.0);
  m.U = HalfspaceSet::box(1, 1.0);
  m.W = Ellipsoid(Matrix::Constant(1, 1, 1e4));
  m.S = Ellipsoid(Matrix::Constant(1, 1, 1e4));
  m.Q = Matrix::Identity(1, 1);
  m.R = Matrix::Identity(1, 1);
  return m;
}

ParamPolytope benchmark_theta0() {
  return ParamPolytope::box(-0.6 * Vector::Ones(3), 0.6 * Vector::Ones(3));
}

const DesignConstants& benchmark_design() {
  static const DesignConstants d = design(benchmark_model(), benchmark_theta0());
  return d;
}

// Gelfand's formula: ρ(A) = lim ‖A^k‖^{1/k}.
double gelfand_radius(const Matrix& a) {
  Matrix p = a;
  double log_scale = 0.0;
  const int k = 400;
  for (int i = 1; i < k; ++i) {
    p = p * a;
    const double s = p.norm();
    p /= s;
    log_scale += std::log(s);
  }
  return std::exp((log_scale + std::log(a.norm())) / k);
}

double independent_contraction(const Matrix& a, const Matrix& P) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(a.transpose() * P * a, P);
  return std::sqrt(ges.eigenvalues().maxCoeff());
}

}  // namespace

TEST(DesignGain, ScalarRiccatiFixedPoint) {
  const auto m = scalar_model(0.5, 1.0);
  const Matrix K = design_gain(m, Vector::Zero(1));
  double x = 1.0;
  for (int i = 0; i < 10000; ++i) x = 1.0 + 0.25 * x - (0.5 * x) * (0.5 * x) / (1.0 + x);
  EXPECT_NEAR(K(0, 0), -0.5 * x / (1.0 + x), 1e-10);
  EXPECT_LT(std::abs(0.5 + K(0, 0)), 1.0);
}

TEST(DesignGain, RejectsUncontrollable) {
  const auto m = scalar_model(0.5, 0.0);
  try {
    design_gain(m, Vector::Zero(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Uncontrollable);
  }
}

TEST(DesignGain, BenchmarkVerticesStable) {
  const auto m = benchmark_model();
  const auto verts = enumerate_vertices(benchmark_theta0());
  const Matrix K = design_gain(m, Vector::Zero(3), verts);
  for (const auto& v : verts) EXPECT_LT(gelfand_radius(closed_loop(m, v, K)), 1.0);
}

TEST(CommonLyapunov, BlendSingleVertexIsLyapunovSolution) {
  const auto m = benchmark_model();
  const Matrix K = design_gain(m, Vector::Zero(3));
  DesignOptions opts;
  opts.method = LyapunovMethod::Blend;
  opts.theta_nominal = Vector::Zero(3);
  const auto cl = common_lyapunov(m, K, {Vector::Zero(3)}, opts);
  const Matrix a = closed_loop(m, Vector::Zero(3), K);
  const Matrix q = m.Q + K.transpose() * m.R * K;
  EXPECT_LE((a.transpose() * cl.P * a - cl.P + q).norm(), 1e-9);
  EXPECT_LT(cl.lambda(0), 1.0);
}

TEST(CommonLyapunov, ScaledIdentityContraction) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int k = 0; k < 5; ++k) {
    Matrix r(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = g(rng);
    const Matrix P = r * r.transpose() + Matrix::Identity(3, 3);
    EXPECT_NEAR(induced_norm(0.7 * Matrix::Identity(3, 3), P), 0.7, 1e-10);
  }
}

TEST(CommonLyapunov, BenchmarkBoxContractsAtEveryVertex) {
  const auto& d = benchmark_design();
  const auto m = benchmark_model();
  ASSERT_EQ(d.vertices.size(), 8U);
  for (std::size_t j = 0; j < d.vertices.size(); ++j) {
    const double lam = independent_contraction(closed_loop(m, d.vertices[j], d.K), d.P);
    EXPECT_NEAR(lam, d.lambda(static_cast<Eigen::Index>(j)), 1e-9);
    EXPECT_LT(lam, 1.0);
  }
  // Reference optimum of the same min-max problem from an SDP bisection.
  EXPECT_NEAR(d.lambda.maxCoeff(), 0.8424, 2e-3);
}

TEST(CommonLyapunov, LyapunovDecreaseAlongVertices) {
  const auto& d = benchmark_design();
  const auto m = benchmark_model();
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (const auto& v : d.vertices) {
    const Matrix a = closed_loop(m, v, d.K);
    for (int k = 0; k < 100; ++k) {
      Vector z(4);
      for (int i = 0; i < 4; ++i) z(i) = g(rng);
      const Vector zn = a * z;
      EXPECT_LT(zn.dot(d.P * zn), z.dot(d.P * z));
    }
  }
}

TEST(CommonLyapunov, BlendOnBenchmarkReachesThreshold) {
  DesignOptions opts;
  opts.method = LyapunovMethod::Blend;
  const auto m = benchmark_model();
  const Matrix K = design_gain(m, Vector::Zero(3));
  const auto cl = common_lyapunov(m, K, enumerate_vertices(benchmark_theta0()), opts);
  EXPECT_LE(cl.lambda.maxCoeff(), 1.0 - 1e-3);
}

TEST(ImageRadius, TrivialCases) {
  const Ellipsoid unit(Matrix::Identity(2, 2));
  EXPECT_EQ(ellipsoid_image_radius(Matrix::Identity(2, 2), Matrix::Zero(2, 2), unit), 0.0);
  EXPECT_NEAR(ellipsoid_image_radius(Matrix::Identity(2, 2), Matrix::Identity(2, 2), unit),
              1.0, 1e-14);
}

TEST(ImageRadius, BenchmarkDisturbanceMatchesBoundarySampling) {
  const auto& d = benchmark_design();
  const auto m = benchmark_model();
  const Matrix Linv_t = m.W.cholesky_lower().transpose().inverse();
  double best = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double phi = 2.0 * M_PI * k / n;
    const Vector w = Linv_t * (Vector(2) << std::cos(phi), std::sin(phi)).finished();
    ASSERT_NEAR(m.W.level(w), 1.0, 1e-9);
    const Vector y = m.F * w;
    best = std::max(best, y.dot(d.P * y));
  }
  EXPECT_NEAR(d.beta_w / best, 1.0, 0.005);
}

TEST(TerminalRadius, DisturbanceFreeSetByConstraints) {
  auto m = scalar_model(0.5, 1.0);
  m.W = Ellipsoid(Matrix::Constant(1, 1, 1e30));
  m.S = Ellipsoid(Matrix::Constant(1, 1, 1e30));
  DesignConstants d;
  d.K = Matrix::Constant(1, 1, -0.25);
  d.P = Matrix::Identity(1, 1);
  d.P_inv_sqrt = d.P;
  d.lambda = Vector::Constant(1, 0.5);
  d.beta_s = Vector::Constant(1, 0.0);
  d.beta_w = 0.0;
  // state: r ≤ 1; input: 0.25 r + 1e−15 ≤ 1.
  EXPECT_NEAR(terminal_radius(m, d), 1.0, 1e-12);
  d.lambda(0) = 1.0 - 1e-12;
  d.beta_w = 1e-4;
  try {
    terminal_radius(m, d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TerminalSetEmpty);
  }
}

TEST(TerminalRadius, BenchmarkCertificateRecheck) {
  const auto& d = benchmark_design();
  const auto m = benchmark_model();
  const Matrix Pinv = d.P.inverse();
  ASSERT_GT(d.r_T, 0.0);
  for (Eigen::Index j = 0; j < m.X.size(); ++j) {
    const Vector a = m.X.normals.row(j).transpose();
    EXPECT_GE(m.X.offsets(j) - d.r_T * std::sqrt(a.dot(Pinv * a)), -1e-9);
  }
  for (Eigen::Index j = 0; j < m.U.size(); ++j) {
    const Vector c = m.U.normals.row(j).transpose();
    const Vector kc = d.K.transpose() * c;
    const double s_sup = std::sqrt(c.dot(m.S.shape().inverse() * c));
    EXPECT_GE(m.U.offsets(j) - d.r_T * std::sqrt(kc.dot(Pinv * kc)) - s_sup, -1e-9);
  }
  for (Eigen::Index j = 0; j < d.lambda.size(); ++j)
    EXPECT_GE(d.r_T - d.lambda(j) * d.r_T - std::sqrt(d.beta_s(j)) - std::sqrt(d.beta_w),
              -1e-9);
}

TEST(TerminalRadius, SampledRobustInvariance) {
  const auto& d = benchmark_design();
  const auto m = benchmark_model();
  Rng rng(17);
  std::normal_distribution<double> g;
  for (int k = 0; k < 1000; ++k) {
    Vector dir(4);
    for (int i = 0; i < 4; ++i) dir(i) = g(rng);
    const Vector x = d.P_inv_sqrt * dir.normalized() * d.r_T;
    const auto& v = d.vertices[static_cast<std::size_t>(k) % d.vertices.size()];
    const auto sys = assemble_system(m, v);
    const Vector s = uniform_in_ellipsoid(m.S, rng);
    const Vector w = uniform_in_ellipsoid(m.W, rng);
    const Vector xn = (sys.A + sys.B * d.K) * x + sys.B * s + m.F * w;
    EXPECT_LE(std::sqrt(xn.dot(d.P * xn)), d.r_T + 1e-12);
  }
}

TEST(TerminalCost, ZeroClosedLoop) {
  const auto m = scalar_model(0.5, 1.0);
  const auto tc = terminal_cost(m, Matrix::Constant(1, 1, -0.5), Vector::Zero(1));
  EXPECT_NEAR(tc.P_c(0, 0), 1.0 + 0.25, 1e-14);
}

TEST(TerminalCost, ScalarGeometricSeries) {
  const auto m = scalar_model(0.5, 0.0);
  const auto tc = terminal_cost(m, Matrix::Zero(1, 1), Vector::Zero(1));
  EXPECT_NEAR(tc.P_c(0, 0), 4.0 / 3.0, 1e-14);
}

TEST(TerminalCost, BenchmarkResidualAndTelescoping) {
  const auto& d = benchmark_design();
  const auto m = benchmark_model();
  const Vector th = benchmark_theta_true();
  const auto tc = terminal_cost(m, d.K, th);
  const Matrix a = closed_loop(m, th, d.K);
  const Matrix q = m.Q + d.K.transpose() * m.R * d.K;
  EXPECT_LE((a.transpose() * tc.P_c * a - tc.P_c + q).norm(), 1e-9);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    Vector x(4);
    for (int i = 0; i < 4; ++i) x(i) = g(rng);
    const Vector ax = a * x;
    const double lhs = x.dot(tc.P_c * x) - ax.dot(tc.P_c * ax);
    const double rhs = x.dot(q * x);
    EXPECT_NEAR(lhs / rhs, 1.0, 1e-10);
  }
  auto unstable = m;
  unstable.A_basis[0] *= 20.0;
  EXPECT_THROW(terminal_cost(unstable, d.K, th), Error);
}

TEST(UniformCovariance, ClosedForms) {
  EXPECT_NEAR(uniform_ellipsoid_covariance(Ellipsoid(Matrix::Identity(1, 1)))(0, 0),
              1.0 / 3.0, 1e-15);
  const Matrix c = uniform_ellipsoid_covariance(Ellipsoid(4.0 * Matrix::Identity(2, 2)));
  EXPECT_LE((c - Matrix::Identity(2, 2) / 16.0).norm(), 1e-15);
}

TEST(UniformCovariance, BenchmarkMatchesEmpiricalDraws) {
  const auto m = benchmark_model();
  const Matrix sigma = uniform_ellipsoid_covariance(m.W);
  Rng rng(99);
  Matrix acc = Matrix::Zero(2, 2);
  Vector mean = Vector::Zero(2);
  const int n = 1000000;
  for (int k = 0; k < n; ++k) {
    const Vector w = uniform_in_ellipsoid(m.W, rng);
    acc += w * w.transpose();
    mean += w;
  }
  mean /= n;
  const Matrix emp = acc / n - mean * mean.transpose();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double scale = std::sqrt(sigma(i, i) * sigma(j, j));
      EXPECT_LE(std::abs(emp(i, j) - sigma(i, j)), 0.02 * scale);
    }
}

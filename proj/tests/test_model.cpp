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
#include <random>

#include <gtest/gtest.h>

#include "atmpc/benchmark.hpp"
#include "atmpc/error.hpp"
#include "atmpc/model.hpp"

using namespace atmpc;

namespace {

Vector random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

}  // namespace

TEST(ModelCore, BenchmarkValidates) {
  const auto m = benchmark_model();
  EXPECT_NO_THROW(m.validate());
  EXPECT_EQ(m.nx(), 4);
  EXPECT_EQ(m.nu(), 2);
  EXPECT_EQ(m.nw(), 2);
  EXPECT_EQ(m.p(), 3);
}

TEST(ModelCore, AssembleAtZeroAndUnitParameter) {
  const auto m = benchmark_model();
  const auto s0 = assemble_system(m, Vector::Zero(3));
  EXPECT_EQ(s0.A, m.A_basis[0]);
  EXPECT_EQ(s0.B, m.B_basis[0]);
  Vector e1 = Vector::Zero(3);
  e1(0) = 1.0;
  const auto s1 = assemble_system(m, e1);
  EXPECT_LE((s1.A - (m.A_basis[0] + m.A_basis[1])).norm(), 1e-15);
  EXPECT_LE((s1.B - (m.B_basis[0] + m.B_basis[1])).norm(), 1e-15);
}

TEST(ModelCore, AssembleTrueParameterEntry) {
  const auto m = benchmark_model();
  const auto s = assemble_system(m, benchmark_theta_true());
  const double expected =
      1.08 + (-0.03) * (-0.5) + (-0.07) * (-0.152) + (0.05) * (0.44);
  EXPECT_NEAR(s.A(0, 0), expected, 1e-14);
}

TEST(ModelCore, AssembleRejectsWrongLength) {
  const auto m = benchmark_model();
  EXPECT_THROW(assemble_system(m, Vector::Zero(2)), Error);
}

TEST(ModelCore, RegressorAtOriginIsZero) {
  const auto m = benchmark_model();
  const auto r = build_regressor(m, Vector::Zero(4), Vector::Zero(2));
  EXPECT_EQ(r.Phi.norm(), 0.0);
  EXPECT_EQ(r.phi.norm(), 0.0);
}

TEST(ModelCore, RegressorFirstUnitState) {
  const auto m = benchmark_model();
  Vector x = Vector::Zero(4);
  x(0) = 1.0;
  const auto r = build_regressor(m, x, Vector::Zero(2));
  Matrix expected(4, 3);
  expected << -3, -7, 5,  //
      -2, 7, -8,          //
      -8, 5, 0,           //
      -3, -4, -6;
  expected *= 1e-2;
  EXPECT_LE((r.Phi - expected).norm(), 1e-15);
}

TEST(ModelCore, RegressorIdentityOnRandomInputs) {
  const auto m = benchmark_model();
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const Vector x = random_vector(4, rng);
    const Vector u = random_vector(2, rng);
    const Vector th = random_vector(3, rng);
    const auto s = assemble_system(m, th);
    const auto r = build_regressor(m, x, u);
    const Vector lhs = s.A * x + s.B * u;
    const Vector rhs = r.Phi * th + r.phi;
    EXPECT_LE((lhs - rhs).norm(), 1e-12 * std::max(1.0, lhs.norm()));
  }
}

TEST(ModelCore, RegressorIsLinear) {
  const auto m = benchmark_model();
  std::mt19937_64 rng(12);
  const Vector x1 = random_vector(4, rng), x2 = random_vector(4, rng);
  const Vector u1 = random_vector(2, rng), u2 = random_vector(2, rng);
  const double a = 0.37;
  const auto lhs = build_regressor(m, a * x1 + x2, a * u1 + u2);
  const auto r1 = build_regressor(m, x1, u1);
  const auto r2 = build_regressor(m, x2, u2);
  EXPECT_LE((lhs.Phi - (a * r1.Phi + r2.Phi)).norm(), 1e-14);
  EXPECT_LE((lhs.phi - (a * r1.phi + r2.phi)).norm(), 1e-14);
}

TEST(ModelCore, StepDynamics) {
  const auto m = benchmark_model();
  const Vector th = benchmark_theta_true();
  EXPECT_EQ(step_dynamics(m, Vector::Zero(4), Vector::Zero(2), Vector::Zero(2),
                          th)
                .norm(),
            0.0);
  std::mt19937_64 rng(13);
  const Vector x = random_vector(4, rng), u = random_vector(2, rng);
  const Vector w = 0.01 * random_vector(2, rng);
  const Vector nominal = step_dynamics(m, x, u, Vector::Zero(2), Vector::Zero(3));
  EXPECT_LE((nominal - (m.A_basis[0] * x + m.B_basis[0] * u)).norm(), 1e-15);
  const auto r = build_regressor(m, x, u);
  EXPECT_LE((step_dynamics(m, x, u, w, th) - (r.Phi * th + r.phi + m.F * w))
                .norm(),
            1e-14);
}

TEST(ModelCore, HalfspaceBoundedness) {
  EXPECT_NO_THROW(HalfspaceSet::box(3, 1.0).validate());
  HalfspaceSet half;
  half.normals = Matrix::Identity(2, 2);
  half.offsets = Vector::Ones(2);
  EXPECT_THROW(half.validate(), Error);
  HalfspaceSet simplex;
  simplex.normals.resize(3, 2);
  simplex.normals << 1, 1, -1, 0, 0, -1;
  simplex.offsets = Vector::Ones(3);
  EXPECT_NO_THROW(simplex.validate());
  HalfspaceSet off = HalfspaceSet::box(2, 1.0);
  off.offsets(0) = -0.1;
  EXPECT_THROW(off.validate(), Error);
}

TEST(ModelCore, EllipsoidSupportAndLevel) {
  Matrix m(2, 2);
  m << 4, 0, 0, 1;
  const Ellipsoid e(m);
  EXPECT_NEAR(e.support((Vector(2) << 1, 0).finished()), 0.5, 1e-15);
  EXPECT_NEAR(e.support((Vector(2) << 0, 1).finished()), 1.0, 1e-15);
  EXPECT_NEAR(e.level((Vector(2) << 0.5, 0).finished()), 1.0, 1e-15);
  Matrix bad(2, 2);
  bad << 1, 0, 0, -1;
  EXPECT_THROW(Ellipsoid{bad}, Error);
}

TEST(ModelCore, RejectsRankDeficientDisturbanceMap) {
  auto m = benchmark_model();
  m.F.col(1) = m.F.col(0);
  EXPECT_THROW(m.validate(), Error);
}

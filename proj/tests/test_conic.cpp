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
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "atmpc/conic.hpp"
#include "atmpc/error.hpp"

using namespace atmpc;

namespace {

SocConstraint ball(Eigen::Index n, const Vector& center, double radius) {
  SocConstraint cone;
  cone.C = Matrix::Identity(n, n);
  cone.d = -center;
  cone.e = Vector::Zero(n);
  cone.f = radius;
  return cone;
}

}  // namespace

TEST(Conic, NormOfConstantVector) {
  ConicProgram prog(1);
  prog.c << 1.0;
  SocConstraint cone;
  cone.C = Matrix::Zero(2, 1);
  cone.d = Vector(2);
  cone.d << 1.0, 2.0;
  cone.e = Vector::Ones(1);
  prog.add_soc(cone);
  const auto sol = solve(prog);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.objective, std::sqrt(5.0), 1e-7);
  EXPECT_NEAR(sol.y(0), std::sqrt(5.0), 1e-7);
}

TEST(Conic, LinearProgramBox) {
  ConicProgram prog(1);
  prog.c << 1.0;
  prog.add_inequality(Vector::Constant(1, 1.0), 1.0);
  prog.add_inequality(Vector::Constant(1, -1.0), 0.0);
  const auto sol = solve(prog);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.y(0), 0.0, 1e-7);
  EXPECT_LE(prog.max_violation(sol.y), 1e-8);
}

TEST(Conic, DetectsInfeasibility) {
  ConicProgram prog(1);
  prog.c << 1.0;
  prog.add_inequality(Vector::Constant(1, 1.0), -1.0);  // y ≤ −1
  prog.add_inequality(Vector::Constant(1, -1.0), -1.0); // y ≥ 1
  EXPECT_EQ(solve(prog).status, SolveStatus::Infeasible);

  ConicProgram socp(2);
  socp.c << 1.0, 0.0;
  socp.add_soc(ball(2, Vector::Zero(2), 1.0));
  socp.add_inequality((Vector(2) << -1.0, 0.0).finished(), -2.0);  // y₁ ≥ 2
  EXPECT_EQ(solve(socp).status, SolveStatus::Infeasible);
}

TEST(Conic, DetectsUnbounded) {
  ConicProgram prog(1);
  prog.c << 1.0;
  prog.add_inequality(Vector::Constant(1, 1.0), 1.0);  // y ≤ 1, minimize y
  EXPECT_EQ(solve(prog).status, SolveStatus::Unbounded);
}

TEST(Conic, EqualityConstrainedBall) {
  // minimize y₁ + y₂ on the unit ball with y₁ = y₂.
  ConicProgram prog(2);
  prog.c << 1.0, 1.0;
  prog.add_equality((Vector(2) << 1.0, -1.0).finished(), 0.0);
  prog.add_soc(ball(2, Vector::Zero(2), 1.0));
  const auto sol = solve(prog);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.objective, -std::sqrt(2.0), 1e-7);
}

// Brute-force oracle: coarse 3-D grid then a fine grid (spacing 2e-4)
// around the coarse winner.
double grid_minimum(const ConicProgram& prog, const Vector& lo,
                    const Vector& hi) {
  auto feasible = [&](const Vector& y) { return prog.max_violation(y) <= 0.0; };
  double best = std::numeric_limits<double>::infinity();
  Vector arg = Vector::Zero(3);
  const double coarse = 0.01;
  Vector y(3);
  for (double a = lo(0); a <= hi(0); a += coarse)
    for (double b = lo(1); b <= hi(1); b += coarse)
      for (double c = lo(2); c <= hi(2); c += coarse) {
        y << a, b, c;
        if (!feasible(y)) continue;
        const double v = prog.c.dot(y);
        if (v < best) {
          best = v;
          arg = y;
        }
      }
  const double fine = 2e-4;
  const Vector center = arg;
  for (int i = -60; i <= 60; ++i)
    for (int j = -60; j <= 60; ++j)
      for (int l = -60; l <= 60; ++l) {
        y << center(0) + i * fine, center(1) + j * fine, center(2) + l * fine;
        if (!feasible(y)) continue;
        best = std::min(best, prog.c.dot(y));
      }
  return best;
}

TEST(Conic, RandomSocpMatchesGridOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    ConicProgram prog(3);
    for (int i = 0; i < 3; ++i) prog.c(i) = uni(rng);
    Vector center(3);
    for (int i = 0; i < 3; ++i) center(i) = 0.2 * uni(rng);
    prog.add_soc(ball(3, center, 0.5));
    Vector row(3);
    for (int i = 0; i < 3; ++i) row(i) = uni(rng);
    prog.add_inequality(row, row.dot(center) + 0.1);  // cuts the ball
    const auto sol = solve(prog);
    ASSERT_EQ(sol.status, SolveStatus::Optimal);
    EXPECT_LE(prog.max_violation(sol.y), 1e-8);
    const Vector lo = center.array() - 0.55;
    const Vector hi = center.array() + 0.55;
    EXPECT_NEAR(sol.objective, grid_minimum(prog, lo, hi), 1e-3);
  }
}

TEST(Conic, RepeatedSolveIsBitIdentical) {
  ConicProgram prog(3);
  prog.c << 0.3, -0.7, 0.2;
  prog.add_soc(ball(3, Vector::Constant(3, 0.1), 1.0));
  prog.add_inequality((Vector(3) << 1.0, 1.0, 1.0).finished(), 0.5);
  prog.add_equality((Vector(3) << 1.0, -2.0, 0.5).finished(), 0.1);
  const auto a = solve(prog);
  const auto b = solve(prog);
  ASSERT_EQ(a.status, SolveStatus::Optimal);
  EXPECT_EQ(a.iterations, b.iterations);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_EQ(a.y(i), b.y(i));
  EXPECT_EQ(a.objective, b.objective);
}

TEST(Conic, DualBoundBracketsOptimum) {
  ConicProgram prog(2);
  prog.c << -1.0, -2.0;
  prog.add_soc(ball(2, Vector::Zero(2), 1.0));
  const auto sol = solve(prog);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.objective, -std::sqrt(5.0), 1e-7);
  EXPECT_NEAR(sol.dual_objective, -std::sqrt(5.0), 1e-7);
}

TEST(Epigraph, IdentityHessianUnconstrained) {
  ConicProgram prog(2);
  const auto epi = min_quadratic_via_epigraph(Matrix::Identity(2, 2),
                                              Vector::Zero(2), prog);
  const auto sol = solve(epi.program);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.y(0), 0.0, 1e-7);
  EXPECT_NEAR(sol.y(1), 0.0, 1e-7);
}

TEST(Epigraph, DiagonalHessianClosedForm) {
  // Oracle: y = −H⁻¹ g.
  Matrix H = 2.0 * Matrix::Identity(2, 2);
  Vector g(2);
  g << -2.0, 0.0;
  const Vector expected = -H.ldlt().solve(g);
  ConicProgram prog(2);
  const auto epi = min_quadratic_via_epigraph(H, g, prog);
  const auto sol = solve(epi.program);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.y(0), expected(0), 1e-7);
  EXPECT_NEAR(sol.y(1), expected(1), 1e-7);
  const Vector yv = sol.y.head(2);
  EXPECT_NEAR(epi.quadratic_value(sol.y(epi.t_index)),
              0.5 * yv.dot(H * yv) + g.dot(yv), 1e-7);
}

TEST(Epigraph, EqualityConstrainedKkt) {
  ConicProgram prog(2);
  prog.add_equality((Vector(2) << 1.0, 0.0).finished(), 1.0);
  const auto epi = min_quadratic_via_epigraph(Matrix::Identity(2, 2),
                                              Vector::Zero(2), prog);
  const auto sol = solve(epi.program);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.y(0), 1.0, 1e-7);
  EXPECT_NEAR(sol.y(1), 0.0, 1e-7);
}

TEST(Epigraph, RejectsIndefiniteAndOutOfRange) {
  ConicProgram prog(2);
  Matrix bad(2, 2);
  bad << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(min_quadratic_via_epigraph(bad, Vector::Zero(2), prog), Error);
  Matrix singular = Matrix::Zero(2, 2);
  singular(0, 0) = 1.0;
  Vector g(2);
  g << 0.0, 1.0;
  EXPECT_THROW(min_quadratic_via_epigraph(singular, g, prog), Error);
}

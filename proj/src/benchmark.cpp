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
#include "atmpc/benchmark.hpp"

namespace atmpc {

namespace {

Matrix rows4x4(std::initializer_list<double> v, double scale = 1.0) {
  Matrix m(4, 4);
  auto it = v.begin();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = scale * *it++;
  return m;
}

Matrix rows4x2(std::initializer_list<double> v, double scale = 1.0) {
  Matrix m(4, 2);
  auto it = v.begin();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = scale * *it++;
  return m;
}

}  // namespace

UncertainModel benchmark_model() {
  UncertainModel m;
  m.A_basis = {
      rows4x4({1.08, -0.12, 0, 0, -0.12, -1.18, 0, 0, 0.36, 0.99, 0.70, 0.04,
               -2.19, -0.04, 0.04, 0.17}),
      rows4x4({-3, 1, 0, 0, -2, -9, 0, 0, -8, 6, -6, -8, -3, 1, -8, -8}, 1e-2),
      rows4x4({-7, -4, 0, 0, 7, 1, 0, 0, 5, -8, -10, -7, -4, 0, 2, 1}, 1e-2),
      rows4x4({5, 6, 0, 0, -8, 10, 0, 0, 0, -5, -3, -7, -6, 8, 8, 1}, 1e-2),
  };
  m.B_basis = {
      rows4x2({0, -0.97, 0, -0.78, 0, -0.44, -1.12, 0.24}),
      rows4x2({-4, -7, 3, -7, -4, -9, 5, 8}, 1e-2),
      rows4x2({5, 8, -5, 7, -7, 0, 8, 2}, 1e-2),
      rows4x2({-7, -6, 7, -5, -3, -2, 10, 5}, 1e-2),
  };
  m.F = rows4x2({0, 0, 0, 0, 1.57, 0, 0, -0.49});
  m.X = HalfspaceSet::box(4, 1.0);
  m.U = HalfspaceSet::box(2, 1.0);
  Matrix pw(2, 2);
  pw << 2.18e4, 0.07e4, 0.07e4, 2.19e4;
  Matrix ps(2, 2);
  ps << 1.45e4, 0.16e4, 0.16e4, 1.3e4;
  m.W = Ellipsoid(pw);
  m.S = Ellipsoid(ps);
  m.Q = Matrix::Identity(4, 4);
  m.R = Matrix::Identity(2, 2);
  return m;
}

Vector benchmark_theta_true() {
  Vector t(3);
  t << -0.5, -0.152, 0.44;
  return t;
}

}  // namespace atmpc

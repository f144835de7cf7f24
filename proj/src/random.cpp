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
#include "atmpc/random.hpp"

#include <cmath>
#include <limits>

#include "atmpc/error.hpp"

namespace atmpc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Vector standard_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

constexpr std::int64_t kProbeAttempts = 200;
constexpr double kMinAcceptance = 0.01;

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Vector uniform_in_ellipsoid(const Ellipsoid& set, Rng& rng) {
  const Eigen::Index n = set.dim();
  Vector dir = standard_normal(n, rng);
  double norm = dir.norm();
  while (norm == 0.0) {
    dir = standard_normal(n, rng);
    norm = dir.norm();
  }
  const double radius = std::pow(uniform01(rng), 1.0 / static_cast<double>(n));
  // With M = L Lᵀ, y = L⁻ᵀ(r·dir) satisfies yᵀMy = r².
  const Vector y = set.cholesky_lower().transpose().triangularView<Eigen::Upper>().solve(
      (radius / norm) * dir);
  return set.center() + y;
}

PolytopeSampler::PolytopeSampler(const ParamPolytope& set) : set_(set) {
  const auto vertices = enumerate_vertices(set_);
  require(!vertices.empty(), ErrorCode::EmptySet, "PolytopeSampler: no vertices");
  lower_ = vertices.front();
  upper_ = vertices.front();
  walker_ = Vector::Zero(set_.dim());
  for (const auto& v : vertices) {
    lower_ = lower_.cwiseMin(v);
    upper_ = upper_.cwiseMax(v);
    walker_ += v;
  }
  walker_ /= static_cast<double>(vertices.size());
  // Directions follow the vertex spread so that thin, tilted sets still mix.
  Matrix spread = Matrix::Zero(set_.dim(), set_.dim());
  for (const auto& v : vertices) spread += (v - walker_) * (v - walker_).transpose();
  spread /= static_cast<double>(vertices.size());
  spread += 1e-12 * (1.0 + spread.trace()) * Matrix::Identity(set_.dim(), set_.dim());
  rounding_ = spread.llt().matrixL();
}

Vector PolytopeSampler::draw(Rng& rng) {
  const Eigen::Index p = set_.dim();
  while (!hit_and_run_) {
    Vector theta(p);
    for (Eigen::Index i = 0; i < p; ++i)
      theta(i) = lower_(i) + (upper_(i) - lower_(i)) * uniform01(rng);
    ++attempts_;
    if (set_.contains(theta)) {
      ++accepted_;
      return theta;
    }
    if (attempts_ >= kProbeAttempts &&
        static_cast<double>(accepted_) <
            kMinAcceptance * static_cast<double>(attempts_))
      hit_and_run_ = true;
  }
  if (!burned_in_) {
    for (Eigen::Index k = 0; k < 50 * p; ++k)
      walker_ = hit_and_run_step(walker_, rng);
    burned_in_ = true;
  }
  for (Eigen::Index k = 0; k < p; ++k) walker_ = hit_and_run_step(walker_, rng);
  return walker_;
}

Vector PolytopeSampler::hit_and_run_step(const Vector& from, Rng& rng) const {
  Vector dir = rounding_ * standard_normal(set_.dim(), rng);
  dir /= dir.norm();
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < set_.facets(); ++j) {
    const double a = set_.Pi.row(j).dot(dir);
    const double slack = set_.mu(j) - set_.Pi.row(j).dot(from);
    if (a > 0.0) hi = std::min(hi, slack / a);
    if (a < 0.0) lo = std::max(lo, slack / a);
  }
  if (!(hi > lo)) return from;
  return from + (lo + (hi - lo) * uniform01(rng)) * dir;
}

}  // namespace atmpc

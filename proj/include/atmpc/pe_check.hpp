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
#ifndef ATMPC_PE_CHECK_HPP
#define ATMPC_PE_CHECK_HPP

#include <deque>
#include <vector>

#include "atmpc/design.hpp"
#include "atmpc/model.hpp"
#include "atmpc/random.hpp"

namespace atmpc {

/// One draw of (θ, w_0..w_{N−1}) for the sampled PE check.
struct UncertaintySample {
  Vector theta;
  std::vector<Vector> w;
};

UncertaintySample sample_uncertainty(PolytopeSampler& theta_sampler,
                                     const Ellipsoid& W, int N, Rng& rng);

/// The last `length` realized (x, u) pairs, oldest first. Starts zero-filled.
class HistoryBuffer {
 public:
  HistoryBuffer(int length, Eigen::Index nx, Eigen::Index nu);

  void push(const Vector& x, const Vector& u);
  [[nodiscard]] int length() const { return static_cast<int>(x_.size()); }
  [[nodiscard]] const Vector& x(int i) const { return x_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] const Vector& u(int i) const { return u_[static_cast<std::size_t>(i)]; }

 private:
  std::deque<Vector> x_;
  std::deque<Vector> u_;
};

/// Predicted trajectory on k ∈ [k_min, k_max]: x has one more entry than u
/// (the state after the last input).
struct Trajectory {
  int k_min = 0;
  std::vector<Vector> x;
  std::vector<Vector> u;

  [[nodiscard]] const Vector& x_at(int k) const { return x[static_cast<std::size_t>(k - k_min)]; }
  [[nodiscard]] const Vector& u_at(int k) const { return u[static_cast<std::size_t>(k - k_min)]; }
};

/// Past from `history`, then x̃_{k+1} = A(θ)x̃_k + B(θ)ũ_k + F w_k with
/// ũ_k = K x̃_k + v_k for 0 ≤ k ≤ k_max (k_max < v.cols()).
Trajectory rollout(const UncertainModel& model, const Matrix& K, const Matrix& v,
                   const UncertaintySample& sample, const HistoryBuffer& history,
                   const Vector& x_now, int k_max);

/// E[Φ(x,u)ᵀΦ(x,u)] for u = Kx + s with E[xxᵀ] = M and Cov(s) = Σ_s.
Matrix expected_gram(const UncertainModel& model, const Matrix& K,
                     const Matrix& M, const Matrix& Sigma_s);

struct PeContext {
  const UncertainModel* model = nullptr;
  const Matrix* K = nullptr;
  const Matrix* Sigma_s = nullptr;
  const Matrix* Sigma_w = nullptr;
  int N = 10;
  int Nu = 5;
};

/// Ψ_κ: Gram sum of the regressors over k = κ..κ+N_u−1. Steps beyond the
/// horizon contribute their expectation given x̃_N.
Matrix pe_matrix(const PeContext& ctx, int kappa, const Matrix& v,
                 const UncertaintySample& sample, const HistoryBuffer& history,
                 const Vector& x_now);

/// Smallest eigenvalue of a symmetric matrix, clamped at zero.
double min_eigenvalue(const Matrix& psi);

/// min over samples of λ_min(Ψ_κ(v, ζ)).
double delta_over_samples(const PeContext& ctx, int kappa, const Matrix& v,
                          const std::vector<UncertaintySample>& samples,
                          const HistoryBuffer& history, const Vector& x_now);

/// Shifted previous plan with `s` appended.
Matrix make_fallback(const Matrix& v_prev, const Vector& s);

enum class GateDecision { AdoptOptimizer, AdoptFallback };

GateDecision pe_gate(double delta, double delta_hat, double epsilon);

/// κ − 1, wrapping from −N_u+1 back to N−1.
int advance_window(int kappa, int N, int Nu);

/// λ_min of the excitation-only expected Gram sum over N_u steps (zero
/// initial moment), minimized over the given parameter points. Zero if the
/// bound is not positive.
double epsilon_phi_bound(const UncertainModel& model, const Matrix& K,
                         const Matrix& Sigma_s, const Matrix& Sigma_w,
                         const std::vector<Vector>& theta_points, int Nu);

/// Vertices of Θ plus a uniform grid (`per_axis` points) inside Θ.
std::vector<Vector> refinement_points(const ParamPolytope& set, int per_axis);

/// λ_min(Σ Φ_kᵀΦ_k).
double closed_loop_pe_coefficient(const std::vector<Matrix>& regressors);

}  // namespace atmpc

#endif  // ATMPC_PE_CHECK_HPP

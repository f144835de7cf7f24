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
#include "atmpc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <exception>
#include <thread>

#include "atmpc/error.hpp"
#include "atmpc/estimator.hpp"
#include "atmpc/pe_check.hpp"
#include "atmpc/random.hpp"
#include "atmpc/tube_mpc.hpp"

namespace atmpc {

namespace {

enum Stream : std::uint64_t { kDisturbance = 1, kGate = 2, kExcitation = 3, kInitial = 4 };

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

Vector initial_theta_hat(const ScenarioConfig& cfg) {
  return cfg.theta_hat0 ? *cfg.theta_hat0 : minmax_center(cfg.theta0, cfg.solver);
}

bool feasible_at_start(const ScenarioConfig& cfg, const OfflineDesign& design,
                       const Vector& x) {
  const Vector theta_hat = initial_theta_hat(cfg);
  const TerminalCost terminal = terminal_cost(cfg.model, design.constants.K, theta_hat);
  TubeProblemSpec spec;
  spec.x = x;
  spec.vertices = enumerate_vertices(cfg.theta0);
  spec.theta_hat = theta_hat;
  spec.theta_bar = minmax_center(cfg.theta0, cfg.solver);
  spec.design = &design.constants;
  spec.terminal = &terminal;
  spec.N = cfg.N;
  spec.pin_initial_tube = cfg.pin_initial_tube;
  return solve_mpc(cfg.model, spec, cfg.solver).status == SolveStatus::Optimal;
}

}  // namespace

const char* to_string(GateOutcome outcome) {
  switch (outcome) {
    case GateOutcome::Skipped: return "skipped";
    case GateOutcome::Optimizer: return "optimizer";
    case GateOutcome::Fallback: return "fallback";
  }
  return "unknown";
}

OfflineDesign offline_design(const ScenarioConfig& cfg) {
  OfflineDesign d;
  d.constants = design(cfg.model, cfg.theta0, cfg.design);
  std::vector<Vector> points = d.constants.vertices;
  if (cfg.epsilon_phi_grid > 0) points = refinement_points(cfg.theta0, cfg.epsilon_phi_grid);
  d.epsilon_phi = epsilon_phi_bound(cfg.model, d.constants.K, d.constants.Sigma_s,
                                    d.constants.Sigma_w, points, cfg.Nu);
  return d;
}

std::vector<Vector> initial_conditions(const ScenarioConfig& cfg, const OfflineDesign& design,
                                       std::uint64_t seed) {
  const std::size_t count = cfg.switch_times.size() + 1;
  std::vector<Vector> pool;
  if (!cfg.initial_conditions.empty()) {
    for (std::size_t i = 0; i < count; ++i)
      pool.push_back(cfg.initial_conditions[i % cfg.initial_conditions.size()]);
    return pool;
  }
  Rng rng(derive_seed(seed, kInitial));
  const Eigen::Index nx = cfg.model.nx();
  constexpr int kMaxDraws = 200;
  while (pool.size() < count) {
    bool found = false;
    for (int attempt = 0; attempt < kMaxDraws && !found; ++attempt) {
      Vector x(nx);
      for (Eigen::Index i = 0; i < nx; ++i)
        x(i) = cfg.initial_radius * (2.0 * uniform01(rng) - 1.0);
      if (feasible_at_start(cfg, design, x)) {
        pool.push_back(x);
        found = true;
      }
    }
    require(found, ErrorCode::InfeasibleAtStart,
            "no feasible initial condition found; reduce initial_radius");
  }
  return pool;
}

EpisodeLog run_episode(const ScenarioConfig& cfg, const OfflineDesign& design,
                       std::uint64_t seed, Variant variant) {
  const UncertainModel& model = cfg.model;
  const DesignConstants& dc = design.constants;
  const Matrix& K = dc.K;
  const int N = cfg.N;
  const int Nu = cfg.Nu;

  EpisodeLog log;
  log.variant = variant;
  log.seed = seed;

  Rng disturbance_rng(derive_seed(seed, kDisturbance));
  Rng gate_rng(derive_seed(seed, kGate));
  Rng excitation_rng(derive_seed(seed, kExcitation));
  const std::vector<Vector> starts = initial_conditions(cfg, design, seed);

  ParamPolytope theta = cfg.theta0;
  Vector theta_hat = initial_theta_hat(cfg);
  TerminalCost terminal = terminal_cost(model, K, theta_hat);

  PeContext pe;
  pe.model = &model;
  pe.K = &K;
  pe.Sigma_s = &dc.Sigma_s;
  pe.Sigma_w = &dc.Sigma_w;
  pe.N = N;
  pe.Nu = Nu;

  std::deque<TransitionRecord> window;
  std::deque<Matrix> recent_regressors;
  HistoryBuffer history(Nu - 1, model.nx(), model.nu());
  Matrix v_prev;
  int kappa = N - 1;
  double J = 0.0;
  std::size_t next_switch = 0;
  Vector x = starts.front();

  for (int t = 0; t < cfg.T_end; ++t) {
    StepRecord rec;
    rec.t = t;
    if (next_switch < cfg.switch_times.size() && cfg.switch_times[next_switch] == t) {
      ++next_switch;
      x = starts[next_switch];
      rec.switched = true;
    }

    // (b) parameter set and nominal estimate
    auto clock = Clock::now();
    const bool adapting = !cfg.freeze_theta_after || t < *cfg.freeze_theta_after;
    if (adapting && !window.empty()) {
      const std::vector<TransitionRecord> data(window.begin(), window.end());
      SupportUpdate upd;
      try {
        upd = support_update(theta, data, model, cfg.estimator);
      } catch (const Error& e) {
        log.abort_reason = e.what();
        return log;
      }
      theta.mu = upd.mu;
      rec.estimator_failures = upd.solver_failures;
      theta_hat = project_nominal(theta_hat, theta, cfg.solver);
      if ((theta_hat - terminal.theta_ref).norm() > 1e-6)
        terminal = terminal_cost(model, K, theta_hat);
    }
    const std::vector<Vector> vertices = enumerate_vertices(theta);
    const Vector theta_bar = minmax_center(theta, cfg.solver);
    rec.ms_b = elapsed_ms(clock);

    Vector u;
    if (variant == Variant::LinearFeedback) {
      u = K * x;
    } else {
      // (c) tube MPC
      clock = Clock::now();
      TubeProblemSpec spec;
      spec.x = x;
      spec.vertices = vertices;
      spec.theta_hat = theta_hat;
      spec.theta_bar = theta_bar;
      spec.design = &dc;
      spec.terminal = &terminal;
      spec.N = N;
      spec.pin_initial_tube = cfg.pin_initial_tube;
      const TubeSolution sol = solve_mpc(model, spec, cfg.solver);
      rec.ms_c = elapsed_ms(clock);
      rec.status = sol.status;
      if (sol.status != SolveStatus::Optimal) {
        if (t == 0)
          throw Error(ErrorCode::InfeasibleAtStart,
                      std::string("initial problem not solved: ") + to_string(sol.status));
        rec.x = x;
        rec.u = Vector::Zero(model.nu());
        rec.mu = theta.mu;
        rec.volume = polytope_volume(theta);
        rec.theta_hat = theta_hat;
        rec.J = J;
        rec.kappa = kappa;
        log.steps.push_back(rec);
        log.abort_reason = std::string("tube MPC ") + to_string(sol.status) + " at t=" +
                           std::to_string(t);
        return log;
      }
      Matrix v_adopt = sol.v;

      // (d) sampled PE check
      clock = Clock::now();
      if (variant == Variant::Full && v_prev.cols() > 0 && t >= Nu - 1) {
        const Vector s = uniform_in_ellipsoid(model.S, excitation_rng);
        const Matrix v_fallback = make_fallback(v_prev, s);
        PolytopeSampler sampler(theta);
        std::vector<UncertaintySample> samples;
        samples.reserve(static_cast<std::size_t>(cfg.Ns));
        for (int i = 0; i < cfg.Ns; ++i)
          samples.push_back(sample_uncertainty(sampler, model.W, N, gate_rng));
        const double delta = delta_over_samples(pe, kappa, sol.v, samples, history, x);
        const double delta_hat = delta_over_samples(pe, kappa, v_fallback, samples, history, x);
        rec.delta = delta;
        rec.delta_hat = delta_hat;
        if (pe_gate(delta, delta_hat, cfg.epsilon_threshold) == GateDecision::AdoptFallback) {
          v_adopt = v_fallback;
          rec.gate = GateOutcome::Fallback;
        } else {
          rec.gate = GateOutcome::Optimizer;
        }
      }
      rec.ms_d = elapsed_ms(clock);
      v_prev = v_adopt;
      u = K * x + v_adopt.col(0);
    }

    recent_regressors.push_back(build_regressor(model, x, u).Phi);
    if (static_cast<int>(recent_regressors.size()) > Nu) recent_regressors.pop_front();
    if (static_cast<int>(recent_regressors.size()) == Nu)
      rec.eps = closed_loop_pe_coefficient(
          std::vector<Matrix>(recent_regressors.begin(), recent_regressors.end()));

    J += x.dot(model.Q * x) + u.dot(model.R * u);
    const Vector w = uniform_in_ellipsoid(model.W, disturbance_rng);
    const Vector x_next = step_dynamics(model, x, u, w, cfg.theta_true);

    rec.x = x;
    rec.u = u;
    rec.mu = theta.mu;
    rec.volume = polytope_volume(theta);
    rec.theta_hat = theta_hat;
    rec.J = J;
    rec.kappa = kappa;
    log.steps.push_back(std::move(rec));

    window.push_back(make_record(model, x, u, x_next));
    if (static_cast<int>(window.size()) > cfg.Nmu) window.pop_front();
    history.push(x, u);
    kappa = advance_window(kappa, N, Nu);
    x = x_next;
  }
  return log;
}

std::vector<EpisodeLog> run_batch(const ScenarioConfig& cfg, const OfflineDesign& design,
                                  const std::vector<std::uint64_t>& seeds, Variant variant,
                                  unsigned threads) {
  std::vector<EpisodeLog> logs(seeds.size());
  if (threads <= 1 || seeds.size() <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i)
      logs[i] = run_episode(cfg, design, seeds[i], variant);
    return logs;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(seeds.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        logs[i] = run_episode(cfg, design, seeds[i], variant);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(seeds.size()));
  for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return logs;
}

}  // namespace atmpc

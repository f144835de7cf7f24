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
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include <gtest/gtest.h>
#include <json.hpp>

#include "atmpc/benchmark.hpp"
#include "atmpc/config.hpp"
#include "atmpc/episode_io.hpp"
#include "atmpc/error.hpp"
#include "atmpc/harness.hpp"

using namespace atmpc;
namespace fs = std::filesystem;

namespace {

std::string benchmark_config_text() {
  return read_text(std::string(ATMPC_SOURCE_DIR) + "/configs/benchmark_static.json");
}

ScenarioConfig short_config(int T_end, std::vector<int> switches = {}) {
  auto j = nlohmann::json::parse(benchmark_config_text());
  j["T_end"] = T_end;
  j["switch_times"] = switches;
  return parse_config(j.dump());
}

const OfflineDesign& benchmark_design() {
  static const OfflineDesign d = offline_design(short_config(10));
  return d;
}

void expect_config_error(const nlohmann::json& j) {
  try {
    parse_config(j.dump());
    FAIL() << "accepted: " << j.dump().substr(0, 80);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Config) << e.what();
  }
}

}  // namespace

TEST(Config, ShippedFileMatchesBenchmarkModel) {
  const auto cfg = parse_config(benchmark_config_text());
  const auto ref = benchmark_model();
  ASSERT_EQ(cfg.model.A_basis.size(), ref.A_basis.size());
  for (std::size_t i = 0; i < ref.A_basis.size(); ++i) {
    EXPECT_LE((cfg.model.A_basis[i] - ref.A_basis[i]).norm(), 1e-15);
    EXPECT_LE((cfg.model.B_basis[i] - ref.B_basis[i]).norm(), 1e-15);
  }
  EXPECT_EQ(cfg.model.F, ref.F);
  EXPECT_EQ(cfg.model.W.shape(), ref.W.shape());
  EXPECT_EQ(cfg.model.S.shape(), ref.S.shape());
  EXPECT_LE((cfg.theta_true - benchmark_theta_true()).norm(), 0.0);
  EXPECT_EQ(cfg.N, 10);
  EXPECT_EQ(cfg.Nu, 5);
  EXPECT_EQ(cfg.Ns, 20);
  EXPECT_EQ(cfg.epsilon_threshold, 1e-6);
  EXPECT_EQ(cfg.seeds.size(), 30U);
  EXPECT_EQ(cfg.switch_times, (std::vector<int>{200, 400}));
}

TEST(Config, UnknownKeysRejectedAtEveryLevel) {
  const auto base = nlohmann::json::parse(benchmark_config_text());
  auto j = base;
  j["horizon"] = 3;
  expect_config_error(j);
  j = base;
  j["model"]["G"] = 1;
  expect_config_error(j);
  j = base;
  j["estimator"]["window"] = 4;
  expect_config_error(j);
  j = base;
  j["model"]["X"]["radius"] = 1;
  expect_config_error(j);
  j = base;
  j["theta0"]["centre"] = {0, 0, 0};
  expect_config_error(j);
}

TEST(Config, StructuralChecks) {
  const auto base = nlohmann::json::parse(benchmark_config_text());
  auto j = base;
  j.erase("theta_true");
  expect_config_error(j);
  j = base;
  j["Nu"] = 4;  // must exceed n_x = 4
  j["Nmu"] = 4;
  expect_config_error(j);
  j = base;
  j["Nmu"] = 3;
  expect_config_error(j);
  j = base;
  j["variant"] = "adaptive";
  expect_config_error(j);
  j = base;
  j["theta_true"] = {0.9, 0.0, 0.0};  // outside Θ_0
  expect_config_error(j);
  j = base;
  j["model"]["F"] = {{0, 0}, {0, 0}, {1, 0}, {2, 0}};  // rank one
  expect_config_error(j);
  j = base;
  j["model"]["A"][1] = {{1, 2}, {3, 4}};
  expect_config_error(j);
  expect_config_error(nlohmann::json::object());
  EXPECT_THROW(parse_config("{not json"), Error);
}

TEST(Config, SwitchPeriodExpands) {
  auto j = nlohmann::json::parse(benchmark_config_text());
  j.erase("switch_times");
  j["switch_period"] = 20;
  j["T_end"] = 100;
  const auto cfg = parse_config(j.dump());
  EXPECT_EQ(cfg.switch_times, (std::vector<int>{20, 40, 60, 80}));
}

TEST(Config, FingerprintIgnoresRunSelection) {
  auto j = nlohmann::json::parse(benchmark_config_text());
  const auto a = scenario_fingerprint(parse_config(j.dump()));
  j["seeds"] = {5};
  j["variant"] = "linear_feedback";
  j["output"] = "elsewhere";
  EXPECT_EQ(scenario_fingerprint(parse_config(j.dump())), a);
  j["Ns"] = 21;
  EXPECT_NE(scenario_fingerprint(parse_config(j.dump())), a);
}

TEST(Csv, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e-6), "1e-06");
  EXPECT_EQ(format_double(-2.0), "-2");
  std::mt19937_64 rng(11);
  for (int k = 0; k < 10000; ++k) {
    double v = 0.0;
    const std::uint64_t bits = rng();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
}

TEST(Aggregate, EnvelopeExamples) {
  const auto single = envelope({{1.5, 2.5}});
  ASSERT_EQ(single.size(), 2U);
  EXPECT_EQ(single[1].mean, 2.5);
  EXPECT_EQ(single[1].min, 2.5);
  EXPECT_EQ(single[1].max, 2.5);
  const auto two = envelope({{1.0}, {3.0}});
  EXPECT_EQ(two[0].mean, 2.0);
  EXPECT_EQ(two[0].min, 1.0);
  EXPECT_EQ(two[0].max, 3.0);
  const auto gaps = envelope({{std::nullopt, 4.0}, {std::nullopt, std::nullopt}});
  EXPECT_EQ(gaps[0].count, 0);
  EXPECT_EQ(gaps[1].count, 1);
  EXPECT_EQ(gaps[1].mean, 4.0);
}

TEST(Aggregate, MedianAndGateRate) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_TRUE(std::isnan(median({})));
  EpisodeLog log;
  for (int t = 0; t < 4; ++t) {
    StepRecord r;
    r.t = t;
    r.volume = 1.0;
    r.gate = t == 0 ? GateOutcome::Skipped : (t == 3 ? GateOutcome::Fallback : GateOutcome::Optimizer);
    log.steps.push_back(r);
  }
  const auto s = aggregate_runs({log});
  ASSERT_EQ(s.gate_failure_rate.size(), 1U);
  EXPECT_DOUBLE_EQ(s.gate_failure_rate[0], 1.0 / 3.0);
  EpisodeLog other = log;
  other.variant = Variant::LinearFeedback;
  EXPECT_THROW(aggregate_runs({log, other}), Error);
}

TEST(Aggregate, MismatchedConfigsRejected) {
  const fs::path dir = fs::temp_directory_path() / "atmpc_mismatch_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto cfg = short_config(3);
  cfg.seeds = {0};
  const auto log = run_episode(cfg, benchmark_design(), 0, Variant::LinearFeedback);
  write_text((dir / episode_file_name(Variant::LinearFeedback, 0)).string(), episode_csv(log));
  write_text((dir / episode_file_name(Variant::Full, 0)).string(), episode_csv(log));
  write_text((dir / "run_linear_feedback.json").string(),
             run_manifest_json(cfg, Variant::LinearFeedback, {0}));
  EXPECT_EQ(aggregate_directory(dir.string()).size(), 1U);
  cfg.Ns = 7;
  write_text((dir / "run_full.json").string(), run_manifest_json(cfg, Variant::Full, {0}));
  try {
    aggregate_directory(dir.string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Config);
  }
  fs::remove_all(dir);
}

TEST(Episode, LinearFeedbackAppliesKxOnly) {
  const auto cfg = short_config(40);
  const auto log = run_episode(cfg, benchmark_design(), 3, Variant::LinearFeedback);
  ASSERT_EQ(log.steps.size(), 40U);
  for (const auto& r : log.steps) {
    EXPECT_EQ(r.u, benchmark_design().constants.K * r.x);
    EXPECT_FALSE(r.status.has_value());
    EXPECT_EQ(r.gate, GateOutcome::Skipped);
    EXPECT_EQ(r.ms_c, 0.0);
  }
}

TEST(Episode, UndisturbedEquilibriumStaysAtRest) {
  ScenarioConfig cfg = short_config(30);
  // 𝒲 must stay a proper ellipsoid, so {0} is approximated by a radius of 1e-15.
  cfg.model.W = Ellipsoid(1e30 * Matrix::Identity(2, 2));
  cfg.theta0 = ParamPolytope::box(cfg.theta_true, cfg.theta_true);
  cfg.theta_hat0 = cfg.theta_true;
  cfg.initial_conditions = {Vector::Zero(4)};
  cfg.switch_times.clear();
  const OfflineDesign design = offline_design(cfg);
  const auto log = run_episode(cfg, design, 0, Variant::NoPeCheck);
  ASSERT_TRUE(log.abort_reason.empty()) << log.abort_reason;
  ASSERT_EQ(log.steps.size(), 30U);
  for (const auto& r : log.steps) EXPECT_LE(r.x.norm(), 1e-7);
  EXPECT_LE(log.steps.back().J, 1e-12);
  const auto lin = run_episode(cfg, design, 0, Variant::LinearFeedback);
  for (const auto& r : lin.steps) EXPECT_LE(r.x.norm(), 1e-13);
  EXPECT_LE(lin.steps.back().J, 1e-24);
}

TEST(Episode, SameSeedIsBitIdentical) {
  const auto cfg = short_config(60, {30});
  const auto a = episode_csv(run_episode(cfg, benchmark_design(), 9, Variant::Full));
  const auto b = episode_csv(run_episode(cfg, benchmark_design(), 9, Variant::Full));
  EXPECT_EQ(a, b);
  EXPECT_EQ(fnv1a64(a), fnv1a64(b));
  const auto c = episode_csv(run_episode(cfg, benchmark_design(), 10, Variant::Full));
  EXPECT_NE(a, c);
}

TEST(Episode, ThreadCountDoesNotChangeLogs) {
  const auto cfg = short_config(30);
  const std::vector<std::uint64_t> seeds{0, 1, 2};
  const auto serial = run_batch(cfg, benchmark_design(), seeds, Variant::Full, 1);
  const auto parallel = run_batch(cfg, benchmark_design(), seeds, Variant::Full, 3);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    EXPECT_EQ(serial[i].seed, seeds[i]);
    EXPECT_EQ(episode_csv(serial[i]), episode_csv(parallel[i]));
  }
}

TEST(Episode, CsvRoundTripIsExact) {
  const auto cfg = short_config(25);
  const auto log = run_episode(cfg, benchmark_design(), 4, Variant::Full);
  const auto text = episode_csv(log);
  const auto back = parse_episode_csv(text);
  ASSERT_EQ(back.steps.size(), log.steps.size());
  for (std::size_t k = 0; k < log.steps.size(); ++k) {
    const auto& a = log.steps[k];
    const auto& b = back.steps[k];
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.u, b.u);
    EXPECT_EQ(a.mu, b.mu);
    EXPECT_EQ(a.J, b.J);
    EXPECT_EQ(a.eps, b.eps);
    EXPECT_EQ(a.delta, b.delta);
    EXPECT_EQ(a.gate, b.gate);
    EXPECT_EQ(a.status, b.status);
  }
  EXPECT_EQ(episode_csv(back), text);
}

TEST(Episode, ClosedLoopInvariantsOnShortRun) {
  const auto cfg = short_config(120, {60});
  for (auto variant : {Variant::Full, Variant::NoPeCheck}) {
    const auto log = run_episode(cfg, benchmark_design(), 1, variant);
    ASSERT_TRUE(log.abort_reason.empty()) << log.abort_reason;
    ASSERT_EQ(log.steps.size(), 120U);
    Vector mu_prev = cfg.theta0.mu;
    double J_prev = 0.0;
    double vol_prev = std::numeric_limits<double>::infinity();
    for (const auto& r : log.steps) {
      EXPECT_LE((cfg.theta0.Pi * cfg.theta_true - r.mu).maxCoeff(), 1e-9) << r.t;
      EXPECT_LE((r.mu - mu_prev).maxCoeff(), 0.0) << r.t;
      EXPECT_LE(r.x.lpNorm<Eigen::Infinity>(), 1.0 + 1e-8);
      EXPECT_LE(r.u.lpNorm<Eigen::Infinity>(), 1.0 + 1e-8);
      ASSERT_TRUE(r.status.has_value());
      EXPECT_EQ(*r.status, SolveStatus::Optimal) << r.t;
      EXPECT_GE(r.J, J_prev);
      EXPECT_LE(r.volume, vol_prev);
      mu_prev = r.mu;
      J_prev = r.J;
      vol_prev = r.volume;
    }
    EXPECT_TRUE(log.steps[60].switched);
  }
}

TEST(Episode, GateSkippedDuringStartup) {
  const auto cfg = short_config(12);
  const auto log = run_episode(cfg, benchmark_design(), 2, Variant::Full);
  for (int t = 0; t < cfg.Nu - 1; ++t) EXPECT_EQ(log.steps[t].gate, GateOutcome::Skipped);
  for (int t = cfg.Nu - 1; t < 12; ++t) {
    EXPECT_NE(log.steps[t].gate, GateOutcome::Skipped);
    ASSERT_TRUE(log.steps[t].delta && log.steps[t].delta_hat);
    const bool fallback = *log.steps[t].delta < *log.steps[t].delta_hat + cfg.epsilon_threshold;
    EXPECT_EQ(log.steps[t].gate == GateOutcome::Fallback, fallback);
  }
  for (int t = 0; t < 12; ++t) EXPECT_EQ(log.steps[t].kappa, 9 - t);
}

TEST(Episode, SharedDisturbancesAcrossVariants) {
  // x_1 − A(θ*)x_0 − B(θ*)u_0 is the first disturbance image; it must agree
  // across variants because the disturbance stream depends on the seed only.
  const auto cfg = short_config(2);
  const auto sys = assemble_system(cfg.model, cfg.theta_true);
  std::vector<Vector> images;
  for (auto variant : {Variant::Full, Variant::NoPeCheck, Variant::LinearFeedback}) {
    const auto log = run_episode(cfg, benchmark_design(), 5, variant);
    images.push_back(log.steps[1].x - sys.A * log.steps[0].x - sys.B * log.steps[0].u);
  }
  EXPECT_LE((images[0] - images[1]).norm(), 1e-15);
  EXPECT_LE((images[0] - images[2]).norm(), 1e-15);
}

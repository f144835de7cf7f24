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
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "atmpc/config.hpp"
#include "atmpc/episode_io.hpp"
#include "atmpc/harness.hpp"

namespace fs = std::filesystem;
using namespace atmpc;

namespace {

struct Options {
  std::string static_config = std::string(ATMPC_SOURCE_DIR) + "/configs/benchmark_static.json";
  std::string switching_config = std::string(ATMPC_SOURCE_DIR) + "/configs/benchmark_switching.json";
  std::string test_dir = ATMPC_TEST_BIN_DIR;
  std::string out;
  int seeds = 30;
  int steps = 600;
  unsigned threads = 0;
  bool quick = false;
};

struct Verdict {
  std::string id;
  bool evaluated = true;
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

std::string fixed(double v, int digits = 1) {
  std::ostringstream s;
  s << std::setprecision(digits) << std::fixed << v;
  return s.str();
}

ScenarioConfig prepare(const std::string& path, const Options& opt) {
  ScenarioConfig cfg = load_config(path);
  cfg.T_end = opt.steps;
  std::erase_if(cfg.switch_times, [&](int t) { return t >= cfg.T_end; });
  cfg.seeds.resize(static_cast<std::size_t>(opt.seeds));
  std::iota(cfg.seeds.begin(), cfg.seeds.end(), std::uint64_t{0});
  cfg.validate();
  return cfg;
}

void save(const std::string& dir, const ScenarioConfig& cfg, const OfflineDesign& design,
          Variant variant, const std::vector<EpisodeLog>& logs) {
  if (dir.empty()) return;
  fs::create_directories(dir);
  write_text((fs::path(dir) / "design.json").string(), design_json(cfg, design));
  for (const auto& log : logs) {
    write_text((fs::path(dir) / episode_file_name(variant, log.seed)).string(), episode_csv(log));
    write_text((fs::path(dir) / timing_file_name(variant, log.seed)).string(), timing_csv(log));
  }
  write_text((fs::path(dir) / (std::string("run_") + to_string(variant) + ".json")).string(),
             run_manifest_json(cfg, variant, cfg.seeds));
}

double volume_ratio(const EpisodeLog& log) {
  return log.steps.back().volume / log.steps.front().volume;
}

// Per-step ε_t outside the 20 steps that follow each state reset.
std::vector<double> settled_eps(const EpisodeLog& log) {
  std::vector<double> out;
  int since_switch = 1 << 30;
  for (const auto& r : log.steps) {
    since_switch = r.switched ? 0 : since_switch + 1;
    if (since_switch < 20 || !r.eps) continue;
    out.push_back(*r.eps);
  }
  return out;
}

double pooled_eps_median(const std::vector<EpisodeLog>& logs) {
  std::vector<double> all;
  for (const auto& log : logs) {
    const auto e = settled_eps(log);
    all.insert(all.end(), e.begin(), e.end());
  }
  return median(all);
}

double gate_failure_rate(const EpisodeLog& log) {
  int checked = 0;
  int failed = 0;
  for (const auto& r : log.steps) {
    if (r.gate == GateOutcome::Skipped) continue;
    ++checked;
    if (r.gate == GateOutcome::Fallback) ++failed;
  }
  return checked > 0 ? static_cast<double>(failed) / checked : std::nan("");
}

Verdict check_p1(const ScenarioConfig& cfg, const std::vector<const std::vector<EpisodeLog>*>& runs,
                 double seconds) {
  Verdict v{"P1", true, false, ""};
  int theta_out = 0, mu_up = 0, x_viol = 0, u_viol = 0, not_optimal = 0, aborted = 0;
  double worst_x = 0.0, worst_u = 0.0;
  const Vector support_true = cfg.theta0.Pi * cfg.theta_true;
  for (const auto* logs : runs) {
    for (const auto& log : *logs) {
      if (!log.abort_reason.empty() || static_cast<int>(log.steps.size()) != cfg.T_end) ++aborted;
      Vector mu_prev = cfg.theta0.mu;
      for (const auto& r : log.steps) {
        if ((support_true - r.mu).maxCoeff() > 1e-9) ++theta_out;
        if ((r.mu - mu_prev).maxCoeff() > 0.0) ++mu_up;
        mu_prev = r.mu;
        const double xn = r.x.lpNorm<Eigen::Infinity>();
        const double un = r.u.lpNorm<Eigen::Infinity>();
        worst_x = std::max(worst_x, xn);
        worst_u = std::max(worst_u, un);
        if (xn > 1.0 + 1e-8) ++x_viol;
        if (un > 1.0 + 1e-8) ++u_viol;
        if (r.status && *r.status != SolveStatus::Optimal) ++not_optimal;
      }
    }
  }
  const bool runtime_ok = seconds <= 20.0 * 60.0;
  v.pass = theta_out == 0 && mu_up == 0 && x_viol == 0 && u_viol == 0 && not_optimal == 0 &&
           aborted == 0 && runtime_ok;
  v.detail = "theta* outside=" + std::to_string(theta_out) + " mu increases=" +
             std::to_string(mu_up) + " max|x|=" + fixed(worst_x, 4) + " max|u|=" +
             fixed(worst_u, 4) + " non-optimal=" + std::to_string(not_optimal) +
             " aborted=" + std::to_string(aborted) + " runtime=" + fixed(seconds) + "s";
  return v;
}

Verdict check_p2(const std::vector<EpisodeLog>& full, const std::vector<EpisodeLog>& nope,
                 const std::vector<EpisodeLog>& lin) {
  auto med = [](const std::vector<EpisodeLog>& logs) {
    std::vector<double> r;
    for (const auto& l : logs) r.push_back(volume_ratio(l));
    return median(r);
  };
  const double f = med(full), n = med(nope), l = med(lin);
  Verdict v{"P2", true, false, ""};
  v.pass = f <= 0.1 * n && l >= 10.0 * f;
  v.detail = "median vol ratio full=" + sci(f) + " no_pe_check=" + sci(n) +
             " linear_feedback=" + sci(l) + " (need full<=0.1*no_pe_check, linear>=10*full)";
  return v;
}

Verdict check_p3(const ScenarioConfig& cfg, const OfflineDesign& design,
                 const std::vector<EpisodeLog>& full, const std::vector<EpisodeLog>& nope,
                 const std::vector<EpisodeLog>& lin) {
  const double ef = pooled_eps_median(full), en = pooled_eps_median(nope),
               el = pooled_eps_median(lin);
  const int reset_kappa = -cfg.Nu + 1;
  const int needed = static_cast<int>(std::ceil(cfg.T_end / 100.0));
  int qualifying_seeds = 0;
  for (const auto& log : full) {
    int hits = 0;
    for (const auto& r : log.steps)
      if (r.kappa == reset_kappa && r.eps && *r.eps >= design.epsilon_phi) ++hits;
    if (hits >= needed) ++qualifying_seeds;
  }
  const int seeds = static_cast<int>(full.size());
  const int seeds_needed = static_cast<int>(std::ceil(25.0 / 30.0 * seeds));
  Verdict v{"P3", true, false, ""};
  const bool ratio_ok = ef >= 10.0 * en;
  const bool linear_ok = el <= 1e-10;
  const bool theorem_ok = qualifying_seeds >= seeds_needed;
  v.pass = ratio_ok && linear_ok && theorem_ok;
  v.detail = std::string("median eps full=") + sci(ef) + " no_pe_check=" + sci(en) + " [" +
             (ratio_ok ? "ok" : "FAIL") + " >=10x]; linear_feedback=" + sci(el) + " [" +
             (linear_ok ? "ok" : "FAIL") + " <=1e-10]; seeds with >=" + std::to_string(needed) +
             " reset windows eps>=eps_phi(" + sci(design.epsilon_phi) + "): " +
             std::to_string(qualifying_seeds) + "/" + std::to_string(seeds) + " [" +
             (theorem_ok ? "ok" : "FAIL") + " >=" + std::to_string(seeds_needed) + "]";
  return v;
}

Verdict check_p4(const std::string& test_dir) {
  struct Oracle {
    const char* label;
    const char* binary;
    const char* filter;
  };
  const Oracle oracles[] = {
      {"a:tail-vs-MC", "test_pe_check", "PeMatrix.ExpectedTailMatchesMonteCarlo"},
      {"b:lambda-min", "test_pe_check", "Delta.EigenvalueExamples:ClosedLoopPe.Examples"},
      {"c:support", "test_estimator",
       "SupportUpdate.ScalarIntervalIntersection:SupportUpdate.TwoParameterMatchesGrid"},
      {"c:projection", "test_estimator", "ProjectNominal.RandomPolytopeMatchesGrid"},
      {"c:mpc", "test_tube_mpc",
       "TubeMpc.CertainScalarMatchesGrid:TubeMpc.TwoStateOneStepMatchesGrid"},
      {"d:lyapunov", "test_linalg", "Linalg.LyapunovResidual"},
      {"d:terminal", "test_design", "TerminalCost.BenchmarkResidualAndTelescoping"},
      {"e:covariance", "test_design", "UniformCovariance.BenchmarkMatchesEmpiricalDraws"},
  };
  Verdict v{"P4", true, false, ""};
  v.pass = true;
  for (const auto& o : oracles) {
    const fs::path bin = fs::path(test_dir) / o.binary;
    bool ok = false;
    if (fs::exists(bin)) {
      const std::string cmd = "\"" + bin.string() + "\" --gtest_filter=" + o.filter +
                              " --gtest_fail_if_no_tests_matched > /dev/null 2>&1";
      ok = std::system(cmd.c_str()) == 0;
    }
    v.pass = v.pass && ok;
    v.detail += std::string(v.detail.empty() ? "" : " ") + o.label + "=" + (ok ? "ok" : "FAIL");
  }
  return v;
}

Verdict check_p5(const ScenarioConfig& cfg, const OfflineDesign& design,
                 const std::vector<EpisodeLog>& reference) {
  Verdict v{"P5", true, false, ""};
  const std::size_t n = std::min<std::size_t>(2, reference.size());
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t i = 0; i < n; ++i) seeds[i] = reference[i].seed;
  const auto serial = run_batch(cfg, design, seeds, Variant::Full, 1);
  const auto parallel = run_batch(cfg, design, seeds, Variant::Full, 2);
  bool same = true;
  std::ostringstream hashes;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ref = episode_csv(reference[i]);
    const auto a = episode_csv(serial[i]);
    const auto b = episode_csv(parallel[i]);
    same = same && fnv1a64(ref) == fnv1a64(a) && fnv1a64(a) == fnv1a64(b) && ref == a && a == b;
    hashes << " seed" << seeds[i] << "=" << std::hex << fnv1a64(ref) << std::dec;
  }
  v.pass = same;
  v.detail = "rerun serial + 2-thread vs original:" + hashes.str() +
             (same ? " (identical)" : " (DIFFER)");
  return v;
}

Verdict check_p6(const std::vector<EpisodeLog>& full) {
  double sb = 0, sc = 0, sd = 0, mb = 0, mc = 0, md = 0;
  int nb = 0, nc = 0, nd = 0;
  for (const auto& log : full)
    for (const auto& r : log.steps) {
      sb += r.ms_b;
      mb = std::max(mb, r.ms_b);
      ++nb;
      if (r.status) {
        sc += r.ms_c;
        mc = std::max(mc, r.ms_c);
        ++nc;
      }
      if (r.gate != GateOutcome::Skipped) {
        sd += r.ms_d;
        md = std::max(md, r.ms_d);
        ++nd;
      }
    }
  const double b = nb ? sb / nb : 0, c = nc ? sc / nc : 0, d = nd ? sd / nd : 0;
  Verdict v{"P6", true, false, ""};
  v.pass = b <= 120.0 && c <= 129.0 && d <= 47.0;
  v.detail = "mean{max} ms (b)=" + fixed(b, 2) + "{" + fixed(mb, 1) + "} (c)=" + fixed(c, 2) +
             "{" + fixed(mc, 1) + "} (d)=" + fixed(d, 2) + "{" + fixed(md, 1) +
             "} limits 120/129/47";
  return v;
}

Verdict check_p7(const std::vector<EpisodeLog>& static_full,
                 const std::vector<EpisodeLog>& switching_full) {
  std::vector<double> a, b;
  for (const auto& l : static_full) a.push_back(gate_failure_rate(l));
  for (const auto& l : switching_full) b.push_back(gate_failure_rate(l));
  const double ms = median(a), mw = median(b);
  Verdict v{"P7", true, false, ""};
  v.pass = ms - mw >= 0.20;
  v.detail = "median gate-failure rate static=" + fixed(100 * ms) + "% switching=" +
             fixed(100 * mw) + "% (need >=20 points lower)";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Acceptance report for the adaptive tube MPC simulator"};
  app.add_option("--static", opt.static_config, "Static scenario config");
  app.add_option("--switching", opt.switching_config, "Switching scenario config");
  app.add_option("--seeds", opt.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  app.add_option("--steps", opt.steps, "Steps per episode")->check(CLI::PositiveNumber);
  app.add_option("--threads", opt.threads, "Worker threads (default: all cores)");
  app.add_option("--out", opt.out, "Directory for episode logs");
  app.add_option("--test-dir", opt.test_dir, "Directory holding the unit-test binaries");
  app.add_flag("--quick", opt.quick,
               "Smoke run (2 seeds x 100 steps); statistical criteria are skipped");
  CLI11_PARSE(app, argc, argv);
  if (opt.quick) {
    opt.seeds = 2;
    opt.steps = 100;
  }
  unsigned threads = opt.threads > 0 ? opt.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, threads);

  using Clock = std::chrono::steady_clock;
  auto seconds_since = [](Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };

  const ScenarioConfig cfg = prepare(opt.static_config, opt);
  const OfflineDesign design = offline_design(cfg);
  std::cerr << "design: lambda_max=" << design.constants.lambda.maxCoeff()
            << " r_T=" << design.constants.r_T << " eps_phi=" << design.epsilon_phi << "\n";

  auto t0 = Clock::now();
  const auto full = run_batch(cfg, design, cfg.seeds, Variant::Full, threads);
  const double full_seconds = seconds_since(t0);
  std::cerr << "full: " << fixed(full_seconds) << " s\n";
  t0 = Clock::now();
  const auto nope = run_batch(cfg, design, cfg.seeds, Variant::NoPeCheck, threads);
  std::cerr << "no_pe_check: " << fixed(seconds_since(t0)) << " s\n";
  const auto lin = run_batch(cfg, design, cfg.seeds, Variant::LinearFeedback, threads);
  const std::string static_dir = opt.out.empty() ? "" : (fs::path(opt.out) / "static").string();
  save(static_dir, cfg, design, Variant::Full, full);
  save(static_dir, cfg, design, Variant::NoPeCheck, nope);
  save(static_dir, cfg, design, Variant::LinearFeedback, lin);

  std::vector<Verdict> verdicts;
  verdicts.push_back(check_p1(cfg, {&full, &nope}, full_seconds));
  if (opt.quick) {
    verdicts.push_back({"P2", false, false, "skipped in quick mode"});
    verdicts.push_back({"P3", false, false, "skipped in quick mode"});
  } else {
    verdicts.push_back(check_p2(full, nope, lin));
    verdicts.push_back(check_p3(cfg, design, full, nope, lin));
  }
  verdicts.push_back(check_p4(opt.test_dir));
  verdicts.push_back(check_p5(cfg, design, full));
  verdicts.push_back(check_p6(full));
  if (opt.quick) {
    verdicts.push_back({"P7", false, false, "skipped in quick mode"});
  } else {
    const ScenarioConfig sw = prepare(opt.switching_config, opt);
    const OfflineDesign sw_design = offline_design(sw);
    t0 = Clock::now();
    const auto sw_full = run_batch(sw, sw_design, sw.seeds, Variant::Full, threads);
    std::cerr << "switching full: " << fixed(seconds_since(t0)) << " s\n";
    if (!opt.out.empty())
      save((fs::path(opt.out) / "switching").string(), sw, sw_design, Variant::Full, sw_full);
    verdicts.push_back(check_p7(full, sw_full));
  }

  bool all = true;
  for (const auto& v : verdicts) {
    const char* tag = !v.evaluated ? "SKIP" : (v.pass ? "PASS" : "FAIL");
    std::cout << v.id << " " << tag << "  " << v.detail << "\n";
    if (v.evaluated) all = all && v.pass;
  }
  return all ? 0 : 1;
}

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
#include "atmpc/episode_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "atmpc/error.hpp"
#include "atmpc/estimator.hpp"

namespace atmpc {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorCode::Io,
          "bad number '" + s + "' in CSV");
  return v;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

int count_prefixed(const std::vector<std::string>& header, const std::string& prefix) {
  int n = 0;
  for (const auto& h : header)
    if (h.rfind(prefix, 0) == 0 && h.size() > prefix.size() &&
        std::isdigit(static_cast<unsigned char>(h[prefix.size()])))
      ++n;
  return n;
}

SolveStatus parse_status(const std::string& s) {
  for (auto st : {SolveStatus::Optimal, SolveStatus::Infeasible, SolveStatus::Unbounded,
                  SolveStatus::NumericalFailure})
    if (s == to_string(st)) return st;
  throw Error(ErrorCode::Io, "unknown solver status '" + s + "'");
}

GateOutcome parse_gate(const std::string& s) {
  for (auto g : {GateOutcome::Skipped, GateOutcome::Optimizer, GateOutcome::Fallback})
    if (s == to_string(g)) return g;
  throw Error(ErrorCode::Io, "unknown gate outcome '" + s + "'");
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

void accumulate(TimingStats& s, double value, bool present) {
  if (!present) return;
  s.mean += value;
  s.max = std::max(s.max, value);
  ++s.count;
}

}  // namespace

std::string episode_csv(const EpisodeLog& log) {
  std::ostringstream out;
  const auto nx = log.steps.empty() ? 0 : log.steps.front().x.size();
  const auto nu = log.steps.empty() ? 0 : log.steps.front().u.size();
  const auto nm = log.steps.empty() ? 0 : log.steps.front().mu.size();
  const auto np = log.steps.empty() ? 0 : log.steps.front().theta_hat.size();
  out << "t,switched";
  for (Eigen::Index i = 0; i < nx; ++i) out << ",x" << i;
  for (Eigen::Index i = 0; i < nu; ++i) out << ",u" << i;
  for (Eigen::Index i = 0; i < nm; ++i) out << ",mu" << i;
  out << ",volume";
  for (Eigen::Index i = 0; i < np; ++i) out << ",theta_hat" << i;
  out << ",J,eps,kappa,delta,delta_hat,gate,status,estimator_failures\n";
  for (const auto& r : log.steps) {
    out << r.t << ',' << (r.switched ? 1 : 0);
    for (Eigen::Index i = 0; i < nx; ++i) out << ',' << format_double(r.x(i));
    for (Eigen::Index i = 0; i < nu; ++i) out << ',' << format_double(r.u(i));
    for (Eigen::Index i = 0; i < nm; ++i) out << ',' << format_double(r.mu(i));
    out << ',' << format_double(r.volume);
    for (Eigen::Index i = 0; i < np; ++i) out << ',' << format_double(r.theta_hat(i));
    out << ',' << format_double(r.J) << ',' << opt(r.eps) << ',' << r.kappa << ','
        << opt(r.delta) << ',' << opt(r.delta_hat) << ',' << to_string(r.gate) << ','
        << (r.status ? to_string(*r.status) : "none") << ',' << r.estimator_failures << '\n';
  }
  return out.str();
}

std::string timing_csv(const EpisodeLog& log) {
  std::ostringstream out;
  out << "t,ms_b,ms_c,ms_d\n";
  for (const auto& r : log.steps)
    out << r.t << ',' << format_double(r.ms_b) << ',' << format_double(r.ms_c) << ','
        << format_double(r.ms_d) << '\n';
  return out.str();
}

EpisodeLog parse_episode_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::Io, "empty episode CSV");
  const auto header = split(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* name : {"t", "switched", "volume", "J", "eps", "kappa", "delta", "delta_hat",
                           "gate", "status", "estimator_failures"})
    require(col.count(name) > 0, ErrorCode::Io, std::string("episode CSV lacks column ") + name);
  const int nx = count_prefixed(header, "x");
  const int nu = count_prefixed(header, "u");
  const int nm = count_prefixed(header, "mu");
  const int np = count_prefixed(header, "theta_hat");
  auto vec = [&](const std::vector<std::string>& cells, const std::string& prefix, int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = parse_double(cells.at(col.at(prefix + std::to_string(i))));
    return v;
  };
  EpisodeLog log;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    require(cells.size() == header.size(), ErrorCode::Io, "ragged episode CSV row");
    StepRecord r;
    r.t = std::stoi(cells[col["t"]]);
    r.switched = cells[col["switched"]] == "1";
    r.x = vec(cells, "x", nx);
    r.u = vec(cells, "u", nu);
    r.mu = vec(cells, "mu", nm);
    r.volume = parse_double(cells[col["volume"]]);
    r.theta_hat = vec(cells, "theta_hat", np);
    r.J = parse_double(cells[col["J"]]);
    r.eps = parse_opt(cells[col["eps"]]);
    r.kappa = std::stoi(cells[col["kappa"]]);
    r.delta = parse_opt(cells[col["delta"]]);
    r.delta_hat = parse_opt(cells[col["delta_hat"]]);
    r.gate = parse_gate(cells[col["gate"]]);
    const auto& status = cells[col["status"]];
    if (status != "none") r.status = parse_status(status);
    r.estimator_failures = std::stoi(cells[col["estimator_failures"]]);
    log.steps.push_back(std::move(r));
  }
  return log;
}

std::vector<Envelope> envelope(const std::vector<std::vector<std::optional<double>>>& series) {
  std::size_t length = 0;
  for (const auto& s : series) length = std::max(length, s.size());
  std::vector<Envelope> out(length);
  for (std::size_t k = 0; k < length; ++k) {
    auto& e = out[k];
    double sum = 0.0;
    for (const auto& s : series) {
      if (k >= s.size() || !s[k]) continue;
      const double v = *s[k];
      if (e.count == 0) {
        e.min = v;
        e.max = v;
      } else {
        e.min = std::min(e.min, v);
        e.max = std::max(e.max, v);
      }
      sum += v;
      ++e.count;
    }
    if (e.count > 0) e.mean = sum / e.count;
  }
  return out;
}

RunSummary aggregate_runs(const std::vector<EpisodeLog>& logs) {
  require(!logs.empty(), ErrorCode::InvalidArgument, "aggregate_runs: no logs");
  RunSummary s;
  s.variant = logs.front().variant;
  s.episodes = static_cast<int>(logs.size());
  std::vector<std::vector<std::optional<double>>> vol, eps, cost;
  for (const auto& log : logs) {
    require(log.variant == s.variant, ErrorCode::Config,
            "aggregate_runs: logs mix variants");
    if (!log.abort_reason.empty()) ++s.aborted;
    std::vector<std::optional<double>> v, e, j;
    int checked = 0;
    int failed = 0;
    for (const auto& r : log.steps) {
      v.emplace_back(r.volume);
      e.push_back(r.eps);
      j.emplace_back(r.J);
      if (r.gate != GateOutcome::Skipped) ++checked;
      if (r.gate == GateOutcome::Fallback) ++failed;
      accumulate(s.ms_b, r.ms_b, true);
      accumulate(s.ms_c, r.ms_c, r.status.has_value());
      accumulate(s.ms_d, r.ms_d, r.gate != GateOutcome::Skipped);
    }
    s.gate_failure_rate.push_back(checked > 0 ? static_cast<double>(failed) / checked
                                              : std::numeric_limits<double>::quiet_NaN());
    vol.push_back(std::move(v));
    eps.push_back(std::move(e));
    cost.push_back(std::move(j));
  }
  for (TimingStats* t : {&s.ms_b, &s.ms_c, &s.ms_d})
    if (t->count > 0) t->mean /= t->count;
  s.volume = envelope(vol);
  s.eps = envelope(eps);
  s.J = envelope(cost);
  return s;
}

std::string summary_csv(const std::vector<RunSummary>& runs) {
  std::ostringstream out;
  out << "variant,t,episodes,volume_mean,volume_min,volume_max,eps_count,eps_mean,eps_min,"
         "eps_max,J_mean,J_min,J_max\n";
  auto cells = [](const Envelope& e) {
    if (e.count == 0) return std::string(",,");
    return format_double(e.mean) + ',' + format_double(e.min) + ',' + format_double(e.max);
  };
  for (const auto& run : runs) {
    for (std::size_t k = 0; k < run.volume.size(); ++k) {
      const Envelope none{};
      const Envelope& e = k < run.eps.size() ? run.eps[k] : none;
      out << to_string(run.variant) << ',' << k << ',' << run.volume[k].count << ','
          << cells(run.volume[k]) << ',' << e.count << ',' << cells(e) << ','
          << cells(run.J[k]) << '\n';
    }
  }
  return out.str();
}

double median(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }),
               values.end());
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string summary_stats_csv(const std::vector<RunSummary>& runs) {
  std::ostringstream out;
  out << "variant,episodes,aborted,gate_failure_rate_mean,gate_failure_rate_median,"
         "ms_b_mean,ms_b_max,ms_c_mean,ms_c_max,ms_d_mean,ms_d_max\n";
  for (const auto& run : runs) {
    double sum = 0.0;
    int n = 0;
    for (double r : run.gate_failure_rate)
      if (!std::isnan(r)) {
        sum += r;
        ++n;
      }
    auto stat = [](const TimingStats& t) {
      if (t.count == 0) return std::string(",");
      return format_double(t.mean) + ',' + format_double(t.max);
    };
    out << to_string(run.variant) << ',' << run.episodes << ',' << run.aborted << ','
        << (n > 0 ? format_double(sum / n) : "") << ','
        << (n > 0 ? format_double(median(run.gate_failure_rate)) : "") << ','
        << stat(run.ms_b) << ',' << stat(run.ms_c) << ',' << stat(run.ms_d) << '\n';
  }
  return out.str();
}

std::string design_json(const ScenarioConfig& cfg, const OfflineDesign& design) {
  const auto& d = design.constants;
  json j;
  j["fingerprint"] = fnv1a64(scenario_fingerprint(cfg));
  j["method"] = to_string(d.method);
  j["K"] = to_json(d.K);
  j["P"] = to_json(d.P);
  j["theta_nominal"] = to_json(d.theta_nominal);
  j["vertices"] = json::array();
  for (const auto& v : d.vertices) j["vertices"].push_back(to_json(v));
  j["lambda"] = to_json(d.lambda);
  j["beta_w"] = d.beta_w;
  j["beta_s"] = to_json(d.beta_s);
  j["r_T"] = d.r_T;
  j["Sigma_s"] = to_json(d.Sigma_s);
  j["Sigma_w"] = to_json(d.Sigma_w);
  j["epsilon_phi"] = design.epsilon_phi;
  j["N"] = cfg.N;
  j["Nu"] = cfg.Nu;
  j["Nmu"] = cfg.Nmu;
  j["Ns"] = cfg.Ns;
  j["epsilon_threshold"] = cfg.epsilon_threshold;
  return j.dump(2) + "\n";
}

std::string run_manifest_json(const ScenarioConfig& cfg, Variant variant,
                              const std::vector<std::uint64_t>& seeds) {
  json j;
  j["variant"] = to_string(variant);
  j["fingerprint"] = fnv1a64(scenario_fingerprint(cfg));
  j["seeds"] = seeds;
  j["T_end"] = cfg.T_end;
  return j.dump(2) + "\n";
}

std::string episode_file_name(Variant variant, std::uint64_t seed) {
  return std::string("episode_") + to_string(variant) + "_seed" + std::to_string(seed) + ".csv";
}

std::string timing_file_name(Variant variant, std::uint64_t seed) {
  return std::string("timing_") + to_string(variant) + "_seed" + std::to_string(seed) + ".csv";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
  require(out.good(), ErrorCode::Io, "write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<RunSummary> aggregate_directory(const std::string& dir) {
  require(fs::is_directory(dir), ErrorCode::Io, "not a directory: " + dir);
  std::vector<fs::path> manifests;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("run_", 0) == 0 && entry.path().extension() == ".json")
      manifests.push_back(entry.path());
  }
  std::sort(manifests.begin(), manifests.end());
  require(!manifests.empty(), ErrorCode::Io, "no run manifests in " + dir);

  std::optional<std::uint64_t> fingerprint;
  std::vector<RunSummary> out;
  for (const auto& path : manifests) {
    const json m = json::parse(read_text(path.string()));
    const auto fp = m.at("fingerprint").get<std::uint64_t>();
    require(!fingerprint || *fingerprint == fp, ErrorCode::Config,
            "mismatched configs: " + path.filename().string());
    fingerprint = fp;
    const Variant variant = parse_variant(m.at("variant").get<std::string>());
    const auto T_end = m.at("T_end").get<int>();
    std::vector<EpisodeLog> logs;
    for (const auto seed : m.at("seeds").get<std::vector<std::uint64_t>>()) {
      EpisodeLog log =
          parse_episode_csv(read_text((fs::path(dir) / episode_file_name(variant, seed)).string()));
      log.variant = variant;
      log.seed = seed;
      if (static_cast<int>(log.steps.size()) < T_end) log.abort_reason = "short log";
      const auto timing_path = fs::path(dir) / timing_file_name(variant, seed);
      if (fs::exists(timing_path)) {
        std::istringstream in(read_text(timing_path.string()));
        std::string line;
        std::getline(in, line);
        std::size_t k = 0;
        while (std::getline(in, line) && k < log.steps.size()) {
          const auto cells = split(line);
          require(cells.size() == 4, ErrorCode::Io, "bad timing row");
          log.steps[k].ms_b = parse_double(cells[1]);
          log.steps[k].ms_c = parse_double(cells[2]);
          log.steps[k].ms_d = parse_double(cells[3]);
          ++k;
        }
      }
      logs.push_back(std::move(log));
    }
    out.push_back(aggregate_runs(logs));
  }
  return out;
}

}  // namespace atmpc

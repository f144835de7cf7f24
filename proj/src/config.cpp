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
#include "atmpc/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "atmpc/error.hpp"

namespace atmpc {

using nlohmann::json;

const char* to_string(Variant variant) {
  switch (variant) {
    case Variant::Full: return "full";
    case Variant::NoPeCheck: return "no_pe_check";
    case Variant::LinearFeedback: return "linear_feedback";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "full") return Variant::Full;
  if (name == "no_pe_check") return Variant::NoPeCheck;
  if (name == "linear_feedback") return Variant::LinearFeedback;
  throw Error(ErrorCode::Config, "unknown variant '" + name + "'");
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  require(obj.is_object(), ErrorCode::Config, where + " must be an object");
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& item : obj.items())
    require(names.count(item.key()) > 0, ErrorCode::Config,
            "unknown key '" + item.key() + "' in " + where);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  require(obj.contains(key), ErrorCode::Config,
          std::string("missing key '") + key + "' in " + where);
  return obj.at(key);
}

double number(const json& j, const std::string& where) {
  require(j.is_number(), ErrorCode::Config, where + " must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  require(j.is_number_integer(), ErrorCode::Config, where + " must be an integer");
  return j.get<int>();
}

Vector vector_from(const json& j, const std::string& where) {
  require(j.is_array(), ErrorCode::Config, where + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = number(j[i], where);
  return v;
}

Matrix matrix_from(const json& j, const std::string& where) {
  require(j.is_array() && !j.empty() && j[0].is_array(), ErrorCode::Config,
          where + " must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    require(row.is_array() && static_cast<Eigen::Index>(row.size()) == cols,
            ErrorCode::Config, where + " has ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = number(row[static_cast<std::size_t>(c)], where);
  }
  return m;
}

HalfspaceSet halfspaces_from(const json& j, Eigen::Index dim, const std::string& where) {
  check_keys(j, {"box", "normals", "offsets"}, where);
  if (j.contains("box")) {
    require(!j.contains("normals") && !j.contains("offsets"), ErrorCode::Config,
            where + ": 'box' excludes 'normals'/'offsets'");
    return HalfspaceSet::box(dim, number(j["box"], where + ".box"));
  }
  HalfspaceSet h{matrix_from(field(j, "normals", where), where + ".normals"),
                 vector_from(field(j, "offsets", where), where + ".offsets")};
  require(h.normals.cols() == dim && h.normals.rows() == h.offsets.size(),
          ErrorCode::Config, where + ": dimension mismatch");
  return h;
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

UncertainModel model_from(const json& j) {
  const std::string where = "model";
  check_keys(j, {"A", "B", "F", "X", "U", "W", "S", "Q", "R"}, where);
  UncertainModel m;
  const auto& a = field(j, "A", where);
  const auto& b = field(j, "B", where);
  require(a.is_array() && b.is_array() && a.size() == b.size() && a.size() >= 2,
          ErrorCode::Config, "model.A and model.B must list p+1 ≥ 2 matrices each");
  for (std::size_t i = 0; i < a.size(); ++i) {
    m.A_basis.push_back(matrix_from(a[i], "model.A[" + std::to_string(i) + "]"));
    m.B_basis.push_back(matrix_from(b[i], "model.B[" + std::to_string(i) + "]"));
  }
  m.F = matrix_from(field(j, "F", where), "model.F");
  m.X = halfspaces_from(field(j, "X", where), m.A_basis.front().rows(), "model.X");
  m.U = halfspaces_from(field(j, "U", where), m.B_basis.front().cols(), "model.U");
  m.W = Ellipsoid(matrix_from(field(j, "W", where), "model.W"));
  m.S = Ellipsoid(matrix_from(field(j, "S", where), "model.S"));
  m.Q = matrix_from(field(j, "Q", where), "model.Q");
  m.R = matrix_from(field(j, "R", where), "model.R");
  m.validate();
  Eigen::FullPivLU<Matrix> lu(m.F);
  require(lu.rank() == m.F.cols(), ErrorCode::Config,
          "model.F must have full column rank");
  return m;
}

ParamPolytope polytope_from(const json& j, Eigen::Index p) {
  const std::string where = "theta0";
  check_keys(j, {"lower", "upper", "normals", "offsets"}, where);
  ParamPolytope set;
  if (j.contains("lower") || j.contains("upper")) {
    require(!j.contains("normals") && !j.contains("offsets"), ErrorCode::Config,
            "theta0: use either lower/upper or normals/offsets");
    set = ParamPolytope::box(vector_from(field(j, "lower", where), "theta0.lower"),
                             vector_from(field(j, "upper", where), "theta0.upper"));
  } else {
    set.Pi = matrix_from(field(j, "normals", where), "theta0.normals");
    set.mu = vector_from(field(j, "offsets", where), "theta0.offsets");
  }
  require(set.dim() == p && set.Pi.rows() == set.mu.size(), ErrorCode::Config,
          "theta0: dimension mismatch");
  return set;
}

void read_estimator(const json& j, EstimatorSettings& s) {
  check_keys(j, {"mode", "exact_tol"}, "estimator");
  if (j.contains("mode")) {
    const auto mode = j["mode"].get<std::string>();
    if (mode == "projected") s.mode = ResidualMode::Projected;
    else if (mode == "exact") s.mode = ResidualMode::Exact;
    else throw Error(ErrorCode::Config, "estimator.mode must be 'projected' or 'exact'");
  }
  if (j.contains("exact_tol")) s.exact_tol = number(j["exact_tol"], "estimator.exact_tol");
}

void read_solver(const json& j, SolverSettings& s) {
  check_keys(j, {"tol_feas", "tol_gap", "max_iter"}, "solver");
  if (j.contains("tol_feas")) s.tol_feas = number(j["tol_feas"], "solver.tol_feas");
  if (j.contains("tol_gap")) s.tol_gap = number(j["tol_gap"], "solver.tol_gap");
  if (j.contains("max_iter")) s.max_iter = integer(j["max_iter"], "solver.max_iter");
}

void read_design(const json& j, DesignOptions& d) {
  check_keys(j, {"method", "theta_nominal", "P", "minmax_max_iter", "minmax_tol",
                 "blend_gamma", "blend_max_iter"},
             "design");
  if (j.contains("method")) {
    const auto method = j["method"].get<std::string>();
    if (method == "minmax") d.method = LyapunovMethod::MinMax;
    else if (method == "blend") d.method = LyapunovMethod::Blend;
    else throw Error(ErrorCode::Config, "design.method must be 'minmax' or 'blend'");
  }
  if (j.contains("theta_nominal"))
    d.theta_nominal = vector_from(j["theta_nominal"], "design.theta_nominal");
  if (j.contains("P")) d.P_override = matrix_from(j["P"], "design.P");
  if (j.contains("minmax_max_iter"))
    d.minmax_max_iter = integer(j["minmax_max_iter"], "design.minmax_max_iter");
  if (j.contains("minmax_tol")) d.minmax_tol = number(j["minmax_tol"], "design.minmax_tol");
  if (j.contains("blend_gamma")) d.blend_gamma = number(j["blend_gamma"], "design.blend_gamma");
  if (j.contains("blend_max_iter"))
    d.blend_max_iter = integer(j["blend_max_iter"], "design.blend_max_iter");
}

json fingerprint_json(const ScenarioConfig& cfg) {
  const auto& m = cfg.model;
  json model;
  model["A"] = json::array();
  model["B"] = json::array();
  for (const auto& a : m.A_basis) model["A"].push_back(to_json(a));
  for (const auto& b : m.B_basis) model["B"].push_back(to_json(b));
  model["F"] = to_json(m.F);
  model["X"] = {{"normals", to_json(m.X.normals)}, {"offsets", to_json(m.X.offsets)}};
  model["U"] = {{"normals", to_json(m.U.normals)}, {"offsets", to_json(m.U.offsets)}};
  model["W"] = to_json(m.W.shape());
  model["S"] = to_json(m.S.shape());
  model["Q"] = to_json(m.Q);
  model["R"] = to_json(m.R);

  json j;
  j["model"] = model;
  j["theta_true"] = to_json(cfg.theta_true);
  j["theta0"] = {{"normals", to_json(cfg.theta0.Pi)}, {"offsets", to_json(cfg.theta0.mu)}};
  j["theta_hat0"] = cfg.theta_hat0 ? to_json(*cfg.theta_hat0) : json(nullptr);
  j["N"] = cfg.N;
  j["Nu"] = cfg.Nu;
  j["Nmu"] = cfg.Nmu;
  j["Ns"] = cfg.Ns;
  j["epsilon_threshold"] = cfg.epsilon_threshold;
  j["T_end"] = cfg.T_end;
  j["switch_times"] = cfg.switch_times;
  j["initial_conditions"] = json::array();
  for (const auto& x : cfg.initial_conditions) j["initial_conditions"].push_back(to_json(x));
  j["initial_radius"] = cfg.initial_radius;
  j["estimator"] = {{"mode", cfg.estimator.mode == ResidualMode::Exact ? "exact" : "projected"},
                    {"exact_tol", cfg.estimator.exact_tol}};
  j["solver"] = {{"tol_feas", cfg.solver.tol_feas},
                 {"tol_gap", cfg.solver.tol_gap},
                 {"max_iter", cfg.solver.max_iter}};
  json design = {{"method", to_string(cfg.design.method)},
                 {"minmax_max_iter", cfg.design.minmax_max_iter},
                 {"minmax_tol", cfg.design.minmax_tol},
                 {"blend_gamma", cfg.design.blend_gamma},
                 {"blend_max_iter", cfg.design.blend_max_iter}};
  design["theta_nominal"] =
      cfg.design.theta_nominal ? to_json(*cfg.design.theta_nominal) : json(nullptr);
  design["P"] = cfg.design.P_override ? to_json(*cfg.design.P_override) : json(nullptr);
  j["design"] = design;
  j["pin_initial_tube"] = cfg.pin_initial_tube;
  j["freeze_theta_after"] = cfg.freeze_theta_after ? json(*cfg.freeze_theta_after) : json(nullptr);
  j["epsilon_phi_grid"] = cfg.epsilon_phi_grid;
  return j;
}

}  // namespace

void ScenarioConfig::validate() const {
  model.validate();
  const Eigen::Index p = model.p();
  require(theta_true.size() == p, ErrorCode::Config, "theta_true has wrong length");
  require(theta0.dim() == p, ErrorCode::Config, "theta0 has wrong dimension");
  require(theta0.contains(theta_true, 1e-12), ErrorCode::Config,
          "theta_true must lie in theta0");
  if (theta_hat0)
    require(theta_hat0->size() == p && theta0.contains(*theta_hat0, 1e-12),
            ErrorCode::Config, "theta_hat0 must lie in theta0");
  require(N >= 1 && Nu >= 1 && Ns >= 1, ErrorCode::Config, "N, Nu, Ns must be positive");
  require(Nu > model.nx(), ErrorCode::Config, "Nu must exceed the state dimension");
  require(Nu <= Nmu, ErrorCode::Config, "Nu must not exceed Nmu");
  require(N >= Nu, ErrorCode::Config, "N must be at least Nu");
  require(T_end >= 1, ErrorCode::Config, "T_end must be positive");
  require(epsilon_threshold >= 0.0, ErrorCode::Config, "epsilon_threshold must be >= 0");
  require(initial_radius > 0.0, ErrorCode::Config, "initial_radius must be positive");
  for (const auto& x : initial_conditions)
    require(x.size() == model.nx(), ErrorCode::Config, "initial condition has wrong length");
  for (std::size_t i = 0; i < switch_times.size(); ++i) {
    require(switch_times[i] > 0 && switch_times[i] < T_end, ErrorCode::Config,
            "switch times must lie in (0, T_end)");
    require(i == 0 || switch_times[i] > switch_times[i - 1], ErrorCode::Config,
            "switch times must be increasing");
  }
  require(epsilon_phi_grid >= 0, ErrorCode::Config, "epsilon_phi_grid must be >= 0");
}

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, std::string("invalid JSON: ") + e.what());
  }
  check_keys(j, {"model", "theta_true", "theta0", "theta_hat0", "N", "Nu", "Nmu", "Ns",
                 "epsilon_threshold", "T_end", "seeds", "variant", "switch_times",
                 "switch_period", "initial_conditions", "initial_radius", "estimator",
                 "solver", "design", "pin_initial_tube", "freeze_theta_after",
                 "epsilon_phi_grid", "output"},
             "config");
  ScenarioConfig cfg;
  try {
    cfg.model = model_from(field(j, "model", "config"));
    cfg.theta_true = vector_from(field(j, "theta_true", "config"), "theta_true");
    cfg.theta0 = polytope_from(field(j, "theta0", "config"), cfg.model.p());
    if (j.contains("theta_hat0")) cfg.theta_hat0 = vector_from(j["theta_hat0"], "theta_hat0");
    if (j.contains("N")) cfg.N = integer(j["N"], "N");
    if (j.contains("Nu")) cfg.Nu = integer(j["Nu"], "Nu");
    cfg.Nmu = j.contains("Nmu") ? integer(j["Nmu"], "Nmu") : cfg.Nu;
    if (j.contains("Ns")) cfg.Ns = integer(j["Ns"], "Ns");
    if (j.contains("epsilon_threshold"))
      cfg.epsilon_threshold = number(j["epsilon_threshold"], "epsilon_threshold");
    if (j.contains("T_end")) cfg.T_end = integer(j["T_end"], "T_end");
    if (j.contains("seeds")) {
      const auto& s = j["seeds"];
      require(s.is_array() && !s.empty(), ErrorCode::Config, "seeds must be a non-empty array");
      cfg.seeds.clear();
      for (const auto& v : s) {
        require(v.is_number_unsigned(), ErrorCode::Config, "seeds must be non-negative integers");
        cfg.seeds.push_back(v.get<std::uint64_t>());
      }
    }
    if (j.contains("variant")) cfg.variant = parse_variant(j["variant"].get<std::string>());
    require(!(j.contains("switch_times") && j.contains("switch_period")), ErrorCode::Config,
            "use either switch_times or switch_period");
    if (j.contains("switch_times")) {
      for (const auto& v : j["switch_times"]) cfg.switch_times.push_back(integer(v, "switch_times"));
    }
    if (j.contains("switch_period")) {
      const int period = integer(j["switch_period"], "switch_period");
      require(period > 0, ErrorCode::Config, "switch_period must be positive");
      for (int t = period; t < cfg.T_end; t += period) cfg.switch_times.push_back(t);
    }
    if (j.contains("initial_conditions")) {
      for (const auto& x : j["initial_conditions"])
        cfg.initial_conditions.push_back(vector_from(x, "initial_conditions"));
    }
    if (j.contains("initial_radius"))
      cfg.initial_radius = number(j["initial_radius"], "initial_radius");
    if (j.contains("estimator")) read_estimator(j["estimator"], cfg.estimator);
    if (j.contains("solver")) read_solver(j["solver"], cfg.solver);
    cfg.estimator.solver = cfg.solver;
    if (j.contains("design")) read_design(j["design"], cfg.design);
    if (j.contains("pin_initial_tube")) {
      require(j["pin_initial_tube"].is_boolean(), ErrorCode::Config,
              "pin_initial_tube must be a boolean");
      cfg.pin_initial_tube = j["pin_initial_tube"].get<bool>();
    }
    if (j.contains("freeze_theta_after") && !j["freeze_theta_after"].is_null())
      cfg.freeze_theta_after = integer(j["freeze_theta_after"], "freeze_theta_after");
    if (j.contains("epsilon_phi_grid"))
      cfg.epsilon_phi_grid = integer(j["epsilon_phi_grid"], "epsilon_phi_grid");
    if (j.contains("output")) cfg.output = j["output"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    throw Error(ErrorCode::Config, e.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string scenario_fingerprint(const ScenarioConfig& cfg) {
  return fingerprint_json(cfg).dump();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace atmpc

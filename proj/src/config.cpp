#include "girsanov/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace girsanov {

using nlohmann::json;

StochasticMatrix TableControlDiscrete::operator()(int step, std::span<const int> history) const {
  const int last = history.empty() ? -1 : history.back();
  for (const Rule& r : rules_) {
    if (r.step && *r.step != step) continue;
    if (r.last_state && *r.last_state != last) continue;
    return r.matrix;
  }
  return fallback_;
}

QuadraticCoefficients TableControlCtmc::operator()(const JumpHistory& history) const {
  for (const Rule& r : rules_) {
    if (r.jump_count && *r.jump_count != history.jump_count()) continue;
    if (r.current_state && *r.current_state != history.current_state()) continue;
    return r.coefficients;
  }
  return fallback_;
}

DiscreteControl ExperimentConfig::discrete_control() const {
  switch (control_kind) {
    case ControlKind::ConstantMatrix:
      return constant_control(*control_matrix);
    case ControlKind::Table:
      return *table_discrete;
    default:
      throw ConfigError("configuration has no discrete control");
  }
}

CtmcControl ExperimentConfig::ctmc_control() const {
  switch (control_kind) {
    case ControlKind::Quadratic:
      return constant_coefficients(*control_coefficients);
    case ControlKind::Table:
      return *table_ctmc;
    default:
      throw ConfigError("configuration has no continuous-time control");
  }
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

const json& need(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing key '") + key + "'");
  return *it;
}

std::vector<double> as_vector(const json& j, const char* what, int expect) {
  if (!j.is_array()) fail(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) fail(std::string(what) + " must contain numbers");
    out.push_back(v.get<double>());
  }
  if (expect >= 0 && static_cast<int>(out.size()) != expect)
    fail(std::string(what) + " must have length " + std::to_string(expect));
  return out;
}

Matrix as_matrix(const json& j, const char* what, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    fail(std::string(what) + " must be an array of " + std::to_string(n) + " rows");
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const std::vector<double> row = as_vector(j[i], what, n);
    for (int k = 0; k < n; ++k) m(i, k) = row[k];
  }
  return m;
}

int as_state_index(const json& j, const char* what, int n) {
  if (!j.is_number_integer()) fail(std::string(what) + " must be an integer state index");
  const int s = j.get<int>();
  if (s < 1 || s > n) fail(std::string(what) + " must be a 1-based state index in 1.." +
                           std::to_string(n));
  return s - 1;
}

QuadraticCoefficients as_coefficients(const json& j, int n) {
  QuadraticCoefficients c;
  c.a = as_vector(need(j, "a"), "control.a", n);
  c.b = as_vector(need(j, "b"), "control.b", n);
  return c;
}

void parse_control(const json& j, ExperimentConfig& cfg) {
  const int n = cfg.n_states;
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "none") {
    cfg.control_kind = ExperimentConfig::ControlKind::None;
  } else if (kind == "constant_matrix") {
    if (cfg.mode != ExperimentConfig::Mode::Discrete)
      fail("constant_matrix controls apply to discrete mode");
    cfg.control_kind = ExperimentConfig::ControlKind::ConstantMatrix;
    cfg.control_matrix = StochasticMatrix(as_matrix(need(j, "matrix"), "control.matrix", n));
  } else if (kind == "quadratic") {
    if (cfg.mode != ExperimentConfig::Mode::Ctmc)
      fail("quadratic controls apply to ctmc mode");
    cfg.control_kind = ExperimentConfig::ControlKind::Quadratic;
    cfg.control_coefficients = as_coefficients(j, n);
  } else if (kind == "table") {
    cfg.control_kind = ExperimentConfig::ControlKind::Table;
    const json& dflt = need(j, "default");
    if (cfg.mode == ExperimentConfig::Mode::Discrete) {
      std::vector<TableControlDiscrete::Rule> rules;
      if (j.contains("rules")) {
        for (const auto& r : j["rules"]) {
          TableControlDiscrete::Rule rule{
              std::nullopt, std::nullopt,
              StochasticMatrix(as_matrix(need(r, "matrix"), "rule matrix", n))};
          if (r.contains("step")) rule.step = r["step"].get<int>();
          if (r.contains("last_state"))
            rule.last_state = as_state_index(r["last_state"], "rule last_state", n);
          rules.push_back(std::move(rule));
        }
      }
      cfg.table_discrete = TableControlDiscrete(
          std::move(rules), StochasticMatrix(as_matrix(need(dflt, "matrix"), "default matrix", n)));
    } else {
      std::vector<TableControlCtmc::Rule> rules;
      if (j.contains("rules")) {
        for (const auto& r : j["rules"]) {
          TableControlCtmc::Rule rule{std::nullopt, std::nullopt, as_coefficients(r, n)};
          if (r.contains("jump_count")) rule.jump_count = r["jump_count"].get<int>();
          if (r.contains("current_state"))
            rule.current_state = as_state_index(r["current_state"], "rule current_state", n);
          rules.push_back(std::move(rule));
        }
      }
      cfg.table_ctmc = TableControlCtmc(std::move(rules), as_coefficients(dflt, n));
    }
  } else {
    fail("unknown control kind '" + kind + "'");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be an object");

  ExperimentConfig cfg;
  const std::string mode = need(j, "mode").get<std::string>();
  if (mode == "discrete")
    cfg.mode = ExperimentConfig::Mode::Discrete;
  else if (mode == "ctmc")
    cfg.mode = ExperimentConfig::Mode::Ctmc;
  else
    fail("mode must be 'discrete' or 'ctmc'");

  const json& jn = need(j, "state_space");
  if (!jn.is_number_integer()) fail("state_space must be an integer");
  cfg.n_states = jn.get<int>();
  StateSpace{cfg.n_states};  // enforces N >= 2

  cfg.initial = Distribution(as_vector(need(j, "initial"), "initial", cfg.n_states));

  const Matrix ref = as_matrix(need(j, "reference"), "reference", cfg.n_states);
  if (cfg.mode == ExperimentConfig::Mode::Discrete) {
    // The discrete theorems require a strictly positive reference.
    cfg.p0 = StochasticMatrix(ref, /*require_positive=*/true);
  } else {
    cfg.q0 = GeneratorMatrix(ref, /*require_positive_offdiag=*/true);
  }

  if (j.contains("control"))
    parse_control(j["control"], cfg);
  else
    cfg.control_kind = ExperimentConfig::ControlKind::None;

  if (j.contains("claimed_reference")) {
    if (cfg.mode != ExperimentConfig::Mode::Discrete)
      fail("claimed_reference is a discrete-mode fixture");
    cfg.claimed_reference = StochasticMatrix(
        as_matrix(j["claimed_reference"], "claimed_reference", cfg.n_states),
        /*require_positive=*/true);
  }

  const json& horizon = need(j, "horizon");
  if (cfg.mode == ExperimentConfig::Mode::Discrete) {
    const json& s = need(horizon, "steps");
    if (!s.is_number_integer() || s.get<int>() < 0) fail("horizon.steps must be an integer >= 0");
    cfg.steps = s.get<int>();
  } else {
    const json& t = need(horizon, "time");
    if (!t.is_number() || !(t.get<double>() > 0.0)) fail("horizon.time must be > 0");
    cfg.time_horizon = t.get<double>();
  }

  if (j.contains("thresholds")) {
    const json& th = j["thresholds"];
    if (th.contains("exact")) cfg.thresholds.exact = th["exact"].get<double>();
    if (th.contains("round_trip")) cfg.thresholds.round_trip = th["round_trip"].get<double>();
    if (th.contains("sigma")) cfg.thresholds.sigma = th["sigma"].get<double>();
    if (th.contains("samples")) cfg.thresholds.samples = th["samples"].get<std::uint64_t>();
  }

  // Feasibility of quadratic controls is checkable against q0 right away.
  if (cfg.mode == ExperimentConfig::Mode::Ctmc && cfg.has_control()) {
    const auto check = [&](const QuadraticCoefficients& c) { build_quadratic(*cfg.q0, c); };
    if (cfg.control_coefficients) check(*cfg.control_coefficients);
    if (cfg.table_ctmc) {
      check(cfg.table_ctmc->fallback());
      for (const auto& r : cfg.table_ctmc->rules()) check(r.coefficients);
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace girsanov

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "girsanov/path_sim.hpp"

namespace girsanov {

// Experiment configuration: one JSON document holding the state space, the
// initial distribution, the reference law, the target control, and the
// horizon. State indices in files are 1-based; everything here converts to
// the library's 0-based indexing on load.

/// Discrete table control: a finite lookup from (step, last state) to a
/// transition matrix, first matching rule wins, with a mandatory default.
/// Absent fields in a rule match anything.
class TableControlDiscrete {
 public:
  struct Rule {
    std::optional<int> step;        // 1-based step index k
    std::optional<int> last_state;  // 0-based internally
    StochasticMatrix matrix;
  };

  TableControlDiscrete(std::vector<Rule> rules, StochasticMatrix fallback)
      : rules_(std::move(rules)), fallback_(std::move(fallback)) {}

  StochasticMatrix operator()(int step, std::span<const int> history) const;

  const std::vector<Rule>& rules() const { return rules_; }
  const StochasticMatrix& fallback() const { return fallback_; }

 private:
  std::vector<Rule> rules_;
  StochasticMatrix fallback_;
};

/// Continuous-time table control: lookup from (jump count, current state) to
/// quadratic coefficients, first match wins, with a default entry.
class TableControlCtmc {
 public:
  struct Rule {
    std::optional<int> jump_count;
    std::optional<int> current_state;  // 0-based internally
    QuadraticCoefficients coefficients;
  };

  TableControlCtmc(std::vector<Rule> rules, QuadraticCoefficients fallback)
      : rules_(std::move(rules)), fallback_(std::move(fallback)) {}

  QuadraticCoefficients operator()(const JumpHistory& history) const;

  const std::vector<Rule>& rules() const { return rules_; }
  const QuadraticCoefficients& fallback() const { return fallback_; }

 private:
  std::vector<Rule> rules_;
  QuadraticCoefficients fallback_;
};

struct VerifyThresholds {
  double exact = 1e-12;
  double round_trip = 1e-10;
  double sigma = 4.0;
  std::uint64_t samples = 100'000;
};

struct ExperimentConfig {
  enum class Mode { Discrete, Ctmc };
  enum class ControlKind { None, ConstantMatrix, Quadratic, Table };

  Mode mode = Mode::Discrete;
  int n_states = 0;
  std::optional<Distribution> initial;

  std::optional<StochasticMatrix> p0;  // discrete reference
  std::optional<GeneratorMatrix> q0;   // continuous reference

  ControlKind control_kind = ControlKind::None;
  std::optional<StochasticMatrix> control_matrix;
  std::optional<QuadraticCoefficients> control_coefficients;
  std::optional<TableControlDiscrete> table_discrete;
  std::optional<TableControlCtmc> table_ctmc;

  // Verification fixture: a deliberately different matrix claimed as the
  // reference while `p0` drives the simulation. Exercised by the verify
  // suites to show mismatches are detected.
  std::optional<StochasticMatrix> claimed_reference;

  int steps = 0;            // discrete horizon
  double time_horizon = 0;  // continuous horizon

  VerifyThresholds thresholds;

  bool has_control() const { return control_kind != ControlKind::None; }
  DiscreteControl discrete_control() const;  // throws if no discrete control
  CtmcControl ctmc_control() const;          // throws if no continuous control
};

/// Parse and validate a config file. Structural problems (unreadable file,
/// bad JSON, missing keys, wrong shapes) raise ConfigError; invalid
/// matrices/distributions raise the validation errors.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

}  // namespace girsanov

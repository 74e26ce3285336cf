// Command-line driver: validate experiment configs, run reference-law
// simulations to CSV, verify the change-of-measure machinery against exact
// and statistical oracles, and compute importance-sampling estimates.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "girsanov/config.hpp"
#include "girsanov/likelihood.hpp"
#include "girsanov/martingale_verify.hpp"
#include "girsanov/oracle.hpp"
#include "girsanov/report.hpp"
#include "girsanov/representation.hpp"

namespace {

using namespace girsanov;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

double max_abs_row_deviation(const StochasticMatrix& m) {
  double worst = 0.0;
  for (int i = 0; i < m.size(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < m.size(); ++j) sum += m(i, j);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const std::string& config_path) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cout << "parse-error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cout << "invalid: " << e.what() << "\n";
    return kExitCheckFailed;
  }

  std::cout << "state_space: " << cfg.n_states << " states\n";
  std::cout << "initial: valid distribution\n";
  if (cfg.mode == ExperimentConfig::Mode::Discrete) {
    std::cout << "reference: strictly positive stochastic matrix (row-sum deviation "
              << format_double(max_abs_row_deviation(*cfg.p0)) << ")\n";
  } else {
    std::cout << "reference: generator with strictly positive off-diagonals\n";
  }
  switch (cfg.control_kind) {
    case ExperimentConfig::ControlKind::None:
      std::cout << "control: none (reference law only)\n";
      break;
    case ExperimentConfig::ControlKind::ConstantMatrix:
      std::cout << "control: constant stochastic matrix\n";
      break;
    case ExperimentConfig::ControlKind::Quadratic:
      std::cout << "control: quadratic coefficients, feasibility margin "
                << format_double(feasibility_margin(*cfg.q0, *cfg.control_coefficients)) << "\n";
      break;
    case ExperimentConfig::ControlKind::Table:
      if (cfg.mode == ExperimentConfig::Mode::Discrete)
        std::cout << "control: table with " << cfg.table_discrete->rules().size()
                  << " rule(s) and a default matrix\n";
      else
        std::cout << "control: table with " << cfg.table_ctmc->rules().size()
                  << " rule(s), all entries feasible\n";
      break;
  }
  if (cfg.claimed_reference) std::cout << "claimed_reference: present (verification fixture)\n";
  std::cout << "horizon: "
            << (cfg.mode == ExperimentConfig::Mode::Discrete
                    ? std::to_string(cfg.steps) + " steps"
                    : format_double(cfg.time_horizon) + " time units")
            << "\n";
  std::cout << "ok\n";
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& config_path, const std::string& out_path, std::uint64_t seed,
                 std::uint64_t samples) {
  const ExperimentConfig cfg = load_config(config_path);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + out_path + "'");

  const bool with_z = cfg.has_control();
  if (cfg.mode == ExperimentConfig::Mode::Discrete) {
    out << "sample_index,terminal_state";
    if (with_z) out << ",terminal_log_z";
    out << "\n";
    const std::optional<DiscreteControl> ctrl =
        with_z ? std::optional<DiscreteControl>(cfg.discrete_control()) : std::nullopt;
    const auto rows = sample_discrete_batch(*cfg.initial, *cfg.p0, ctrl ? &*ctrl : nullptr,
                                            cfg.steps, samples, seed, Execution::Parallel);
    for (std::uint64_t i = 0; i < rows.size(); ++i) {
      out << i << ',' << rows[i].terminal_state + 1;
      if (with_z) out << ',' << format_double(rows[i].log_z);
      out << "\n";
    }
  } else {
    out << "sample_index,terminal_state";
    if (with_z) out << ",terminal_log_z";
    out << ",n_jumps\n";
    const std::optional<CtmcControl> ctrl =
        with_z ? std::optional<CtmcControl>(cfg.ctmc_control()) : std::nullopt;
    const auto rows = sample_ctmc_batch(*cfg.initial, *cfg.q0, ctrl ? &*ctrl : nullptr,
                                        cfg.time_horizon, samples, seed, Execution::Parallel);
    for (std::uint64_t i = 0; i < rows.size(); ++i) {
      out << i << ',' << rows[i].terminal_state + 1;
      if (with_z) out << ',' << format_double(rows[i].log_z);
      out << ',' << rows[i].n_jumps << "\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- estimate

std::vector<double> parse_payoff(const std::string& spec, int n_states) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ConfigError("payoff must be 'indicator:<state>' or 'vector:v1,v2,...'");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "indicator") {
    const int state = std::stoi(rest);
    if (state < 1 || state > n_states)
      throw ConfigError("payoff indicator state out of range 1.." + std::to_string(n_states));
    std::vector<double> f(n_states, 0.0);
    f[state - 1] = 1.0;
    return f;
  }
  if (kind == "vector") {
    std::vector<double> f;
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const auto comma = rest.find(',', pos);
      const std::string tok =
          rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      f.push_back(std::stod(tok));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (static_cast<int>(f.size()) != n_states)
      throw ConfigError("payoff vector must have one entry per state");
    return f;
  }
  throw ConfigError("unknown payoff kind '" + kind + "'");
}

int cmd_estimate(const std::string& config_path, const std::string& payoff_spec,
                 std::uint64_t samples, std::uint64_t seed) {
  const ExperimentConfig cfg = load_config(config_path);
  if (!cfg.has_control())
    throw ConfigError("estimate needs a target control in the configuration");
  const std::vector<double> payoff = parse_payoff(payoff_spec, cfg.n_states);

  Estimate est;
  if (cfg.mode == ExperimentConfig::Mode::Discrete) {
    est = importance_estimate_discrete(payoff, *cfg.initial, *cfg.p0, cfg.discrete_control(),
                                       cfg.steps, samples, seed);
  } else {
    est = importance_estimate_ctmc(payoff, *cfg.initial, *cfg.q0, cfg.ctmc_control(),
                                   cfg.time_horizon, samples, seed);
  }
  std::cout << format_double(est.value) << ',' << format_double(est.std_error) << ','
            << est.n_samples << ',' << seed << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ verify

void add_line(CheckReport& report, const std::string& name, double value, double threshold) {
  report.lines.push_back(CheckLine{name, value, threshold, value <= threshold});
}

void verify_discrete_girsanov(const ExperimentConfig& cfg, CheckReport& report) {
  const Distribution& nu = *cfg.initial;
  const StochasticMatrix& p0 = *cfg.p0;
  const StochasticMatrix& formula_p0 = cfg.claimed_reference ? *cfg.claimed_reference : p0;
  const DiscreteControl ctrl =
      cfg.has_control() ? cfg.discrete_control() : constant_control(p0);
  const double tol = cfg.thresholds.exact;

  const WeightedPathSet under_p0 = enumerate_paths(nu, constant_control(p0), cfg.steps);

  double worst_rel = 0.0;
  for (const auto& [path, prob] : under_p0.entries) {
    (void)prob;
    const double engine = std::exp(likelihood_discrete(path, formula_p0, ctrl).terminal_log());
    const double oracle = pathwise_likelihood_oracle(path, nu, ctrl, p0);
    const double scale = std::max(std::abs(engine), std::abs(oracle));
    if (scale > 0.0) worst_rel = std::max(worst_rel, std::abs(engine - oracle) / scale);
  }
  add_line(report, "pathwise-likelihood-max-rel-dev", worst_rel, tol);

  const double mean = exact_expectation(under_p0, [&](const DiscretePath& p) {
    return std::exp(likelihood_discrete(p, formula_p0, ctrl).terminal_log());
  });
  add_line(report, "mean-one-exact", std::abs(mean - 1.0), tol);

  const WeightedPathSet under_p = enumerate_paths(nu, ctrl, cfg.steps);
  double worst_id = 0.0;
  for (int j = 0; j < cfg.n_states; ++j) {
    const double weighted = exact_expectation(under_p0, [&](const DiscretePath& p) {
      return std::exp(likelihood_discrete(p, p0, ctrl).terminal_log()) *
             (p.terminal() == j ? 1.0 : 0.0);
    });
    const double direct = exact_expectation(
        under_p, [&](const DiscretePath& p) { return p.terminal() == j ? 1.0 : 0.0; });
    worst_id = std::max(worst_id, std::abs(weighted - direct));
  }
  add_line(report, "change-of-measure-max-dev", worst_id, tol);
}

void verify_discrete_martingale(const ExperimentConfig& cfg, CheckReport& report) {
  const Distribution& nu = *cfg.initial;
  const StochasticMatrix& p0 = *cfg.p0;
  const DiscreteControl ctrl =
      cfg.has_control() ? cfg.discrete_control() : constant_control(p0);
  const double tol = cfg.thresholds.exact;

  double worst = 0.0;
  for (int j = 0; j < cfg.n_states; ++j) {
    std::vector<double> z(cfg.n_states, 0.0);
    z[j] = 1.0;
    worst = std::max(worst,
                     check_discrete_martingale(nu, ctrl, nullptr, cfg.steps, z).max_residual);
  }
  add_line(report, "markov-martingale-max-indicator-residual", worst, tol);

  const ZMartingaleReport zr = check_z_martingale_discrete(nu, ctrl, p0, cfg.steps);
  add_line(report, "z-martingale-max-atom-residual", zr.max_atom_residual, tol);
  add_line(report, "z-martingale-mean-error", zr.mean_error, tol);

  if (cfg.claimed_reference) {
    // Simulated law p0 versus the claimed compensator: the residual equals
    // the largest conditional-probability mismatch and must be caught.
    const DiscreteControl law = constant_control(p0);
    const DiscreteControl claimed = constant_control(*cfg.claimed_reference);
    double mismatch = 0.0;
    for (int j = 0; j < cfg.n_states; ++j) {
      std::vector<double> z(cfg.n_states, 0.0);
      z[j] = 1.0;
      mismatch = std::max(
          mismatch, check_discrete_martingale(nu, law, &claimed, cfg.steps, z).max_residual);
    }
    add_line(report, "claimed-vs-simulated-max-residual", mismatch, tol);
  }
}

void verify_discrete_representation(const ExperimentConfig& cfg, CheckReport& report) {
  const Distribution& nu = *cfg.initial;
  const StochasticMatrix& p0 = *cfg.p0;
  const DiscreteControl ctrl =
      cfg.has_control() ? cfg.discrete_control() : constant_control(p0);

  double worst_entry = 0.0, worst_row_sum = 0.0;
  for (const auto& [path, prob] : enumerate_paths(nu, constant_control(p0), cfg.steps).entries) {
    (void)prob;
    for (int k = 1; k <= cfg.steps; ++k) {
      const auto prefix = path.states().subspan(0, k);
      double z_prev = 1.0;
      for (int l = 1; l < k; ++l) {
        const StochasticMatrix pl = ctrl(l, prefix.subspan(0, l));
        z_prev *= pl(path[l - 1], path[l]) / p0(path[l - 1], path[l]);
      }
      if (!(z_prev > 0.0)) continue;  // representation is defined on {Z > 0} only
      const StochasticMatrix pk = ctrl(k, prefix);
      const int i = path[k - 1];
      std::vector<double> y(cfg.n_states);
      for (int j = 0; j < cfg.n_states; ++j) y[j] = z_prev * (pk(i, j) / p0(i, j) - 1.0);
      const auto g = delta_basis_decompose(y, p0.row(i));
      const auto row = recover_transition_row(z_prev, g, p0.row(i));
      double sum = 0.0;
      for (int j = 0; j < cfg.n_states; ++j) {
        worst_entry = std::max(worst_entry, std::abs(row[j] - pk(i, j)));
        sum += row[j];
      }
      worst_row_sum = std::max(worst_row_sum, std::abs(sum - 1.0));
    }
  }
  add_line(report, "representation-round-trip-max-dev", worst_entry, cfg.thresholds.round_trip);
  add_line(report, "recovered-row-sum-max-dev", worst_row_sum, cfg.thresholds.exact);
}

void verify_ctmc_girsanov(const ExperimentConfig& cfg, CheckReport& report, std::uint64_t seed) {
  const CtmcControl ctrl = cfg.has_control()
                               ? cfg.ctmc_control()
                               : constant_coefficients(QuadraticCoefficients{
                                     std::vector<double>(cfg.n_states, 0.0),
                                     std::vector<double>(cfg.n_states, 1.0)});
  const MeanStderr ms = check_mean_one_ctmc(*cfg.initial, *cfg.q0, ctrl, cfg.time_horizon,
                                            cfg.thresholds.samples, seed);
  add_line(report, "mean-one-sigma-distance", std::abs(ms.mean - 1.0) / ms.std_error,
           cfg.thresholds.sigma);

  // Recompute Z by independent linear accumulation on a batch of paths.
  double worst_rel = 0.0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    CounterRng rng(seed + 1, i);
    const JumpTrajectory traj =
        simulate_ctmc(*cfg.initial, *cfg.q0, nullptr, cfg.time_horizon, rng);
    const double engine = std::exp(likelihood_ctmc(traj, *cfg.q0, ctrl).terminal_log());
    double jump_product = 1.0, drift = 0.0;
    walk_intervals(traj, *cfg.q0, &ctrl,
                   [&](double t0, double t1, int state, const GeneratorMatrix& q, int target) {
                     drift += (t1 - t0) * ((*cfg.q0)(state, state) - q(state, state));
                     if (target >= 0)
                       jump_product *= q(state, target) / (*cfg.q0)(state, target);
                   });
    const double linear = jump_product * std::exp(-drift);
    const double scale = std::max(std::abs(engine), std::abs(linear));
    if (scale > 0.0) worst_rel = std::max(worst_rel, std::abs(engine - linear) / scale);
  }
  add_line(report, "exponential-identity-max-rel-dev", worst_rel, cfg.thresholds.exact);
}

void verify_ctmc_martingale(const ExperimentConfig& cfg, CheckReport& report, std::uint64_t seed) {
  std::vector<double> f(cfg.n_states, 0.0);
  f[0] = 1.0;
  const std::optional<CtmcControl> ctrl =
      cfg.has_control() ? std::optional<CtmcControl>(cfg.ctmc_control()) : std::nullopt;
  const DynkinReport dr =
      check_dynkin_mc(*cfg.initial, *cfg.q0, ctrl ? &*ctrl : nullptr, nullptr, f,
                      cfg.time_horizon, cfg.thresholds.samples, seed + 2);
  add_line(report, "dynkin-terminal-sigma-distance",
           std::abs(dr.terminal.mean) / dr.terminal.std_error, cfg.thresholds.sigma);
  add_line(report, "dynkin-increment-sigma-distance",
           std::abs(dr.increment.mean) / dr.increment.std_error, cfg.thresholds.sigma);

  const GeneratorLimitReport gl =
      check_generator_limit(*cfg.q0, std::vector<double>{1e-2, 1e-3, 1e-4});
  double worst_ratio = 0.0;
  for (std::size_t i = 1; i < gl.deviation.size(); ++i)
    worst_ratio = std::max(worst_ratio, gl.deviation[i] / gl.deviation[i - 1]);
  add_line(report, "generator-limit-monotone-ratio", worst_ratio, 1.0);
  double worst_linear = 0.0;
  for (std::size_t i = 0; i < gl.deviation.size(); ++i)
    worst_linear = std::max(worst_linear, gl.deviation[i] / (gl.slope * gl.h[i]));
  add_line(report, "generator-limit-linear-bound-ratio", worst_linear, 1.01);
}

void verify_ctmc_representation(const ExperimentConfig& cfg, CheckReport& report,
                                std::uint64_t seed) {
  const GeneratorMatrix& q0 = *cfg.q0;

  // Hadamard round trip for every coefficient snapshot the control can emit.
  std::vector<QuadraticCoefficients> snapshots;
  if (cfg.control_coefficients) snapshots.push_back(*cfg.control_coefficients);
  if (cfg.table_ctmc) {
    snapshots.push_back(cfg.table_ctmc->fallback());
    for (const auto& r : cfg.table_ctmc->rules()) snapshots.push_back(r.coefficients);
  }
  if (snapshots.empty())
    snapshots.push_back(QuadraticCoefficients{std::vector<double>(cfg.n_states, 0.0),
                                              std::vector<double>(cfg.n_states, 1.0)});
  double worst_recon = 0.0, worst_constraint = 0.0;
  for (const auto& c : snapshots) {
    const GeneratorMatrix qt = build_quadratic(q0, c);
    const HadamardCorrection k = hadamard_decompose(qt, q0);
    for (int i = 0; i < cfg.n_states; ++i) {
      double constraint = 0.0;
      for (int j = 0; j < cfg.n_states; ++j) {
        worst_recon =
            std::max(worst_recon, std::abs(q0(i, j) * (1.0 + k.k(i, j)) - qt(i, j)));
        constraint += q0(i, j) * k.k(i, j);
      }
      worst_constraint = std::max(worst_constraint, std::abs(constraint));
    }
  }
  add_line(report, "hadamard-round-trip-max-dev", worst_recon, cfg.thresholds.exact);
  add_line(report, "hadamard-row-constraint-max-dev", worst_constraint,
           cfg.thresholds.round_trip);

  if (cfg.has_control()) {
    const CtmcControl ctrl = cfg.ctmc_control();
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
      CounterRng rng(seed + 3, i);
      const JumpTrajectory traj =
          simulate_ctmc(*cfg.initial, q0, nullptr, cfg.time_horizon, rng);
      const LikelihoodProcess z = likelihood_ctmc(traj, q0, ctrl);
      const JumpCoefficients jc = extract_jump_coefficients(z, traj, q0, ctrl);
      std::size_t snap_index = 0;
      walk_intervals(traj, q0, &ctrl,
                     [&](double, double t1, int state, const GeneratorMatrix& q, int) {
                       if (snap_index >= jc.snapshots.size()) return;
                       const auto& snap = jc.snapshots[snap_index];
                       // Zero-likelihood snapshots are omitted; only consume
                       // the entry that belongs to this interval.
                       if (snap.time != t1 || snap.state_before != state) return;
                       ++snap_index;
                       const HadamardCorrection k = hadamard_decompose(q, q0);
                       for (int j = 0; j < cfg.n_states; ++j) {
                         if (j == state) continue;
                         worst = std::max(worst,
                                          std::abs(snap.h[j] / snap.z_minus - k.k(state, j)));
                       }
                     });
    }
    add_line(report, "jump-coefficient-consistency-max-dev", worst, cfg.thresholds.exact);
  }
}

int cmd_verify(const std::string& config_path, const std::string& suite, std::uint64_t seed) {
  const ExperimentConfig cfg = load_config(config_path);
  const bool run_girsanov = suite == "girsanov" || suite == "all";
  const bool run_martingale = suite == "martingale" || suite == "all";
  const bool run_representation = suite == "representation" || suite == "all";
  if (!run_girsanov && !run_martingale && !run_representation)
    throw ConfigError("unknown suite '" + suite + "'");

  CheckReport report;
  if (cfg.mode == ExperimentConfig::Mode::Discrete) {
    if (run_girsanov) verify_discrete_girsanov(cfg, report);
    if (run_martingale) verify_discrete_martingale(cfg, report);
    if (run_representation) verify_discrete_representation(cfg, report);
  } else {
    if (run_girsanov) verify_ctmc_girsanov(cfg, report, seed);
    if (run_martingale) verify_ctmc_martingale(cfg, report, seed);
    if (run_representation) verify_ctmc_representation(cfg, report, seed);
  }

  int failed = 0;
  for (const auto& line : report.lines) {
    std::cout << format_check_line(line) << "\n";
    if (!line.pass) ++failed;
  }
  const CheckLine summary{"summary", static_cast<double>(failed), 0.0, failed == 0};
  std::cout << format_check_line(summary) << "\n";
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-state Markov change-of-measure toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP thread count (0 = runtime default)");

  std::string config_path, out_path, suite = "all", payoff_spec;
  std::uint64_t seed = 0, samples = 0;

  CLI::App* validate = app.add_subcommand("validate", "Validate a configuration file");
  validate->add_option("config", config_path)->required();

  CLI::App* simulate =
      app.add_subcommand("simulate", "Sample under the reference law, write CSV");
  simulate->add_option("config", config_path)->required();
  simulate->add_option("--out", out_path, "Output CSV path")->required();
  simulate->add_option("--seed", seed, "Master seed")->required();
  simulate->add_option("--samples", samples, "Number of samples")->required();

  CLI::App* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("config", config_path)->required();
  verify->add_option("--suite", suite, "girsanov|martingale|representation|all");
  std::uint64_t verify_seed = 1;
  verify->add_option("--seed", verify_seed, "Master seed for statistical checks");

  CLI::App* estimate = app.add_subcommand("estimate", "Importance-sampling estimate");
  estimate->add_option("config", config_path)->required();
  estimate->add_option("--payoff", payoff_spec, "indicator:<state> or vector:v1,v2,...")
      ->required();
  estimate->add_option("--seed", seed, "Master seed")->required();
  estimate->add_option("--samples", samples, "Number of samples")->required();

  CLI11_PARSE(app, argc, argv);
  apply_threads(threads);

  try {
    if (validate->parsed()) return cmd_validate(config_path);
    if (simulate->parsed()) return cmd_simulate(config_path, out_path, seed, samples);
    if (verify->parsed()) return cmd_verify(config_path, suite, verify_seed);
    if (estimate->parsed()) return cmd_estimate(config_path, payoff_spec, samples, seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ScaleTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

#include "girsanov/likelihood.hpp"

#include <cmath>
#include <limits>

namespace girsanov {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_positive_reference(const StochasticMatrix& p0) {
  if (!p0.strictly_positive())
    throw Error("likelihood_discrete: reference matrix must be strictly positive");
}

void require_positive_offdiag(const GeneratorMatrix& q0) {
  if (!q0.strictly_positive_offdiag())
    throw Error("continuous-time likelihood: reference generator needs strictly positive "
                "off-diagonal rates");
}

}  // namespace

LikelihoodProcess likelihood_discrete(const DiscretePath& path, const StochasticMatrix& p0,
                                      const DiscreteControl& ctrl) {
  require_positive_reference(p0);
  if (p0.size() != path.n_states())
    throw DimensionMismatch("likelihood_discrete: matrix size does not match path state count");

  LikelihoodProcess out;
  out.times.reserve(path.length());
  out.log_values.reserve(path.length());
  out.times.push_back(0.0);
  out.log_values.push_back(0.0);

  double log_z = 0.0;
  for (int k = 1; k <= path.n_steps(); ++k) {
    const StochasticMatrix pk = ctrl(k, path.states().subspan(0, k));
    if (pk.size() != path.n_states())
      throw DimensionMismatch("likelihood_discrete: control matrix size mismatch");
    const int from = path[k - 1], to = path[k];
    const double num = pk(from, to);
    if (num <= 0.0) {
      log_z = kNegInf;
      out.hit_zero = true;
    } else {
      log_z += std::log(num) - std::log(p0(from, to));
    }
    out.times.push_back(static_cast<double>(k));
    out.log_values.push_back(log_z);
  }
  return out;
}

LikelihoodProcess likelihood_ctmc(const JumpTrajectory& traj, const GeneratorMatrix& q0,
                                  const CtmcControl& ctrl) {
  require_positive_offdiag(q0);
  LikelihoodProcess out;
  out.times.push_back(0.0);
  out.log_values.push_back(0.0);

  double log_z = 0.0;
  walk_intervals(traj, q0, &ctrl,
                 [&](double t0, double t1, int state, const GeneratorMatrix& q, int target) {
                   // Drift term over [t0, t1): sum over j != state of
                   // q(state,j) - q0(state,j) equals q0(state,state) - q(state,state).
                   const double drift = q0(state, state) - q(state, state);
                   if (t1 > t0) log_z -= (t1 - t0) * drift;
                   if (target >= 0) {
                     const double num = q(state, target);
                     if (num <= 0.0) {
                       log_z = kNegInf;
                       out.hit_zero = true;
                     } else {
                       log_z += std::log(num / q0(state, target));
                     }
                     out.times.push_back(t1);
                     out.log_values.push_back(log_z);
                   }
                 });
  out.times.push_back(traj.horizon());
  out.log_values.push_back(log_z);
  return out;
}

double compensated_log_integral(const JumpTrajectory& traj, const GeneratorMatrix& q0,
                                const CtmcControl& ctrl, double t) {
  require_positive_offdiag(q0);
  if (t < 0.0 || t > traj.horizon())
    throw TimeOutOfRange("compensated_log_integral: time outside [0, horizon]");

  double u = 0.0;
  walk_intervals(traj, q0, &ctrl,
                 [&](double t0, double t1, int state, const GeneratorMatrix& q, int target) {
                   if (t0 >= t) return;
                   const double seg_end = std::min(t1, t);
                   // Compensator integrand: sum_{j != state} q0(state,j) log r(state,j).
                   double integrand = 0.0;
                   for (int j = 0; j < q0.size(); ++j) {
                     if (j == state) continue;
                     integrand += q0(state, j) * std::log(q(state, j) / q0(state, j));
                   }
                   if (seg_end > t0) u -= (seg_end - t0) * integrand;
                   if (target >= 0 && t1 <= t) u += std::log(q(state, target) / q0(state, target));
                 });
  return u;
}

namespace {

Estimate weighted_mean(std::span<const double> weights) {
  const MeanStderr ms = mean_stderr(weights);
  return Estimate{ms.mean, ms.std_error, ms.n};
}

}  // namespace

Estimate importance_estimate_discrete(std::span<const double> payoff, const Distribution& nu,
                                      const StochasticMatrix& p0, const DiscreteControl& ctrl,
                                      int n_steps, std::uint64_t n_samples,
                                      std::uint64_t master_seed, Execution exec) {
  if (n_samples < 2) throw Error("importance estimate needs at least 2 samples");
  if (static_cast<int>(payoff.size()) != p0.size())
    throw DimensionMismatch("payoff length does not match state count");
  const DiscreteControl reference = constant_control(p0);
  const std::vector<double> weights =
      map_samples(n_samples, master_seed, exec, [&](std::uint64_t, CounterRng& rng) {
        const DiscretePath path = simulate_discrete(nu, reference, n_steps, rng);
        const LikelihoodProcess z = likelihood_discrete(path, p0, ctrl);
        return std::exp(z.terminal_log()) * payoff[path.terminal()];
      });
  return weighted_mean(weights);
}

Estimate importance_estimate_ctmc(std::span<const double> payoff, const Distribution& nu,
                                  const GeneratorMatrix& q0, const CtmcControl& ctrl,
                                  double horizon, std::uint64_t n_samples,
                                  std::uint64_t master_seed, Execution exec) {
  if (n_samples < 2) throw Error("importance estimate needs at least 2 samples");
  if (static_cast<int>(payoff.size()) != q0.size())
    throw DimensionMismatch("payoff length does not match state count");
  const std::vector<double> weights =
      map_samples(n_samples, master_seed, exec, [&](std::uint64_t, CounterRng& rng) {
        const JumpTrajectory traj = simulate_ctmc(nu, q0, nullptr, horizon, rng);
        const LikelihoodProcess z = likelihood_ctmc(traj, q0, ctrl);
        return std::exp(z.terminal_log()) * payoff[traj.final_state()];
      });
  return weighted_mean(weights);
}

}  // namespace girsanov

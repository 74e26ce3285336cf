#pragma once

#include <cstdint>
#include <vector>

#include "girsanov/mc.hpp"
#include "girsanov/path_sim.hpp"

namespace girsanov {

/// The likelihood-ratio process Z along one realized path, kept in log
/// space. Discrete time: one entry per step, times 0..n, log Z_0 = 0.
/// Continuous time: entries at time 0, at every jump epoch (value including
/// that jump's ratio, i.e. the right-continuous Z), and at the horizon.
/// hit_zero marks a realized transition the target law forbids; from there
/// on log Z is -infinity and Z is exactly 0.
struct LikelihoodProcess {
  std::vector<double> times;
  std::vector<double> log_values;
  bool hit_zero = false;

  double terminal_log() const { return log_values.back(); }
};

/// log Z_k = sum_{j<=k} log P_j(X_{j-1},X_j) - log P0(X_{j-1},X_j) along the
/// given path, the control evaluated on the path's own history. P0 must be
/// strictly positive.
LikelihoodProcess likelihood_discrete(const DiscretePath& path, const StochasticMatrix& p0,
                                      const DiscreteControl& ctrl);

/// Continuous-time likelihood ratio along a trajectory:
///   log Z_t = sum_{jumps s<=t into j} log q_s(X_{s-},j)/q0(X_{s-},j)
///           - int_0^t sum_{j != X_s} (q_s(X_s,j) - q0(X_s,j)) ds,
/// the integral exact on the piecewise-constant intervals. q0 must have
/// strictly positive off-diagonals.
LikelihoodProcess likelihood_ctmc(const JumpTrajectory& traj, const GeneratorMatrix& q0,
                                  const CtmcControl& ctrl);

/// The compensated log-ratio integral
///   U_t = sum_{jumps s<=t} log r(X_{s-},target)
///       - int_0^t sum_{j != X_s} q0(X_s,j) log r(X_s,j) ds,   r = q_s/q0,
/// a local martingale under the reference law.
double compensated_log_integral(const JumpTrajectory& traj, const GeneratorMatrix& q0,
                                const CtmcControl& ctrl, double t);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
};

/// E_P[f(X_n)] estimated by sampling under the reference law and weighting
/// by Z_n: the mean of Z_n f(X_n) with its sample standard error. Requires
/// n_samples >= 2. Deterministic for fixed (seed, inputs) at any thread
/// count.
Estimate importance_estimate_discrete(std::span<const double> payoff, const Distribution& nu,
                                      const StochasticMatrix& p0, const DiscreteControl& ctrl,
                                      int n_steps, std::uint64_t n_samples,
                                      std::uint64_t master_seed,
                                      Execution exec = Execution::Parallel);

/// Continuous-time analogue: E_P[f(X_T)] via reference-law sampling of Z_T.
Estimate importance_estimate_ctmc(std::span<const double> payoff, const Distribution& nu,
                                  const GeneratorMatrix& q0, const CtmcControl& ctrl,
                                  double horizon, std::uint64_t n_samples,
                                  std::uint64_t master_seed,
                                  Execution exec = Execution::Parallel);

}  // namespace girsanov

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "girsanov/mc.hpp"
#include "girsanov/oracle.hpp"

namespace girsanov {

// Certification of the martingale characterizations: exact conditional
// checks by path enumeration in discrete time, Monte Carlo with a sigma rule
// in continuous time, and the h -> 0 limit of the semigroup.

inline constexpr double kDefaultSigmaRule = 4.0;
inline constexpr std::uint64_t kDefaultMcSamples = 100'000;

struct DiscreteMartingaleReport {
  double max_residual = 0.0;   // max |E[dM | atom]| over steps and nonnull atoms
  long atoms_checked = 0;
  long null_branches_skipped = 0;
};

/// Exact check of the compensated test-vector process
///   M_k = z_{X_k} - z_{X_0} - sum_{l<=k} ((P_l - I) z)_{X_{l-1}}
/// under the law induced by `law`. The compensator uses `claimed` when
/// given (adversarial fixtures), otherwise the law's own matrices. Every
/// positive-probability history atom at every step is checked. Enumeration
/// scale: N <= 6, n <= 8, N^(n+1) <= 10^6; beyond that ScaleTooLarge.
DiscreteMartingaleReport check_discrete_martingale(const Distribution& nu,
                                                   const DiscreteControl& law,
                                                   const DiscreteControl* claimed, int n_steps,
                                                   std::span<const double> z);

struct ZMartingaleReport {
  double max_atom_residual = 0.0;  // max |E0[Z_k | atom] - Z_{k-1}|
  double mean_error = 0.0;         // |E0[Z_n] - 1|
  long atoms_checked = 0;
};

/// Exact check that the likelihood ratio is a reference-law martingale with
/// mean one, atom by atom, by enumeration under the stationary P0 law.
ZMartingaleReport check_z_martingale_discrete(const Distribution& nu, const DiscreteControl& ctrl,
                                              const StochasticMatrix& p0, int n_steps);

struct DynkinReport {
  MeanStderr terminal;   // E[M_T^f]
  MeanStderr increment;  // E[M_T^f - M_{T/2}^f]

  bool pass(double n_sigma = kDefaultSigmaRule) const {
    return std::abs(terminal.mean) <= n_sigma * terminal.std_error &&
           std::abs(increment.mean) <= n_sigma * increment.std_error;
  }
};

/// Monte Carlo check that M_t^f = f(X_t) - f(X_0) - int_0^t (q_s f)(X_s) ds
/// is centered, simulating the (possibly controlled) law directly; the time
/// integral is exact piecewise. `compensator_override` substitutes a
/// deliberately different generator in the compensator (stationary case
/// only) to exercise the converse direction.
DynkinReport check_dynkin_mc(const Distribution& nu, const GeneratorMatrix& q0,
                             const CtmcControl* ctrl,
                             const GeneratorMatrix* compensator_override,
                             std::span<const double> f, double horizon, std::uint64_t n_samples,
                             std::uint64_t master_seed, Execution exec = Execution::Parallel);

/// Statistical mean-one check: sample mean of Z_T over reference-law
/// trajectories, to be compared with 1 at the sigma rule.
MeanStderr check_mean_one_ctmc(const Distribution& nu, const GeneratorMatrix& q0,
                               const CtmcControl& ctrl, double horizon, std::uint64_t n_samples,
                               std::uint64_t master_seed, Execution exec = Execution::Parallel);

struct GeneratorLimitReport {
  std::vector<double> h;
  std::vector<double> deviation;  // max entrywise |(exp(hQ) - I)/h - Q|
  double slope = 0.0;             // deviation/h estimated from the two largest h
  bool monotone_decreasing = false;
  bool within_linear_bound = false;  // deviation(h) <= slope * h for all h
};

/// Difference-quotient convergence of the semigroup to its generator.
/// h_sequence must be strictly decreasing and positive.
GeneratorLimitReport check_generator_limit(const GeneratorMatrix& q0,
                                           std::span<const double> h_sequence);

}  // namespace girsanov

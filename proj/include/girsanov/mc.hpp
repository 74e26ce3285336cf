#pragma once

#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "girsanov/path_sim.hpp"
#include "girsanov/rng.hpp"

namespace girsanov {

/// Execution policy for the sample-parallel kernels. Serial is the reference
/// implementation; Parallel runs the same per-sample function under OpenMP.
/// Both produce bit-identical results: sample i is a pure function of
/// (master_seed, i), each result lands in slot i, and every reduction walks
/// the slots in index order afterwards.
enum class Execution { Serial, Parallel };

/// Map fn(sample_index, rng) over samples 0..n_samples-1.
template <class Fn>
auto map_samples(std::uint64_t n_samples, std::uint64_t master_seed, Execution exec, Fn&& fn) {
  using R = std::invoke_result_t<Fn&, std::uint64_t, CounterRng&>;
  std::vector<R> out(n_samples);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n_samples); ++i) {
      CounterRng rng(master_seed, static_cast<std::uint64_t>(i));
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::uint64_t>(i), rng);
    }
  } else {
    for (std::uint64_t i = 0; i < n_samples; ++i) {
      CounterRng rng(master_seed, i);
      out[i] = fn(i, rng);
    }
  }
  return out;
}

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
};

/// Two-pass sample mean and standard error, accumulated in index order so
/// the result does not depend on thread count. Requires n >= 2.
MeanStderr mean_stderr(std::span<const double> values);

// --- batch simulation kernels -------------------------------------------
//
// These sample under the REFERENCE law and, when a target control is given,
// carry the log likelihood ratio of the target law along the realized path.

struct DiscreteSample {
  int terminal_state = 0;
  double log_z = 0.0;
};

struct CtmcSample {
  int terminal_state = 0;
  double log_z = 0.0;
  int n_jumps = 0;
};

std::vector<DiscreteSample> sample_discrete_batch(const Distribution& nu,
                                                  const StochasticMatrix& p0,
                                                  const DiscreteControl* target, int n_steps,
                                                  std::uint64_t n_samples,
                                                  std::uint64_t master_seed, Execution exec);

std::vector<CtmcSample> sample_ctmc_batch(const Distribution& nu, const GeneratorMatrix& q0,
                                          const CtmcControl* target, double horizon,
                                          std::uint64_t n_samples, std::uint64_t master_seed,
                                          Execution exec);

}  // namespace girsanov

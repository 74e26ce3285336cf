#include "girsanov/mc.hpp"

#include <cmath>

#include "girsanov/likelihood.hpp"

namespace girsanov {

MeanStderr mean_stderr(std::span<const double> values) {
  const std::uint64_t n = values.size();
  if (n < 2) throw Error("mean_stderr needs at least 2 values");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) {
    const double d = v - mean;
    ss += d * d;
  }
  const double variance = ss / static_cast<double>(n - 1);
  return MeanStderr{mean, std::sqrt(variance / static_cast<double>(n)), n};
}

std::vector<DiscreteSample> sample_discrete_batch(const Distribution& nu,
                                                  const StochasticMatrix& p0,
                                                  const DiscreteControl* target, int n_steps,
                                                  std::uint64_t n_samples,
                                                  std::uint64_t master_seed, Execution exec) {
  const DiscreteControl reference = constant_control(p0);
  return map_samples(n_samples, master_seed, exec, [&](std::uint64_t, CounterRng& rng) {
    const DiscretePath path = simulate_discrete(nu, reference, n_steps, rng);
    DiscreteSample s;
    s.terminal_state = path.terminal();
    s.log_z = target ? likelihood_discrete(path, p0, *target).terminal_log() : 0.0;
    return s;
  });
}

std::vector<CtmcSample> sample_ctmc_batch(const Distribution& nu, const GeneratorMatrix& q0,
                                          const CtmcControl* target, double horizon,
                                          std::uint64_t n_samples, std::uint64_t master_seed,
                                          Execution exec) {
  return map_samples(n_samples, master_seed, exec, [&](std::uint64_t, CounterRng& rng) {
    const JumpTrajectory traj = simulate_ctmc(nu, q0, nullptr, horizon, rng);
    CtmcSample s;
    s.terminal_state = traj.final_state();
    s.n_jumps = traj.n_jumps();
    s.log_z = target ? likelihood_ctmc(traj, q0, *target).terminal_log() : 0.0;
    return s;
  });
}

}  // namespace girsanov

#include "girsanov/martingale_verify.hpp"

#include <algorithm>
#include <cmath>

#include "girsanov/likelihood.hpp"

namespace girsanov {

namespace {

void check_enumeration_pre(int n_states, int n_steps) {
  if (n_states > 6 || n_steps > 8)
    throw ScaleTooLarge("exact martingale checks are limited to N <= 6, n <= 8");
  double count = 1.0;
  for (int k = 0; k <= n_steps; ++k) count *= n_states;
  if (count > static_cast<double>(kEnumerationGuard))
    throw ScaleTooLarge("exact martingale checks would exceed the 10^6-path guard");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Depth-first walk over positive-probability history prefixes under `law`,
// calling visit(prefix, prob) for every prefix of length 1..n_steps (i.e.
// every atom on which a next transition is conditioned).
template <class Visit>
void walk_atoms(const Distribution& nu, const DiscreteControl& law, int n_steps, Visit&& visit,
                long& null_branches) {
  struct Rec {
    const Distribution& nu;
    const DiscreteControl& law;
    int n_steps;
    Visit& visit;
    long& null_branches;
    std::vector<int> prefix;

    void go(double prob) {
      const int k = static_cast<int>(prefix.size());
      if (k > 0 && k <= n_steps) visit(std::span<const int>(prefix), prob);
      if (k == n_steps) return;
      if (k == 0) {
        for (int x0 = 0; x0 < nu.size(); ++x0) {
          if (nu[x0] <= 0.0) {
            ++null_branches;
            continue;
          }
          prefix.push_back(x0);
          go(nu[x0]);
          prefix.pop_back();
        }
        return;
      }
      const StochasticMatrix pk = law(k, prefix);
      const int from = prefix.back();
      for (int to = 0; to < pk.size(); ++to) {
        if (pk(from, to) <= 0.0) {
          ++null_branches;
          continue;
        }
        prefix.push_back(to);
        go(prob * pk(from, to));
        prefix.pop_back();
      }
    }
  };
  Rec rec{nu, law, n_steps, visit, null_branches, {}};
  rec.prefix.reserve(static_cast<std::size_t>(n_steps) + 1);
  rec.go(1.0);
}

}  // namespace

DiscreteMartingaleReport check_discrete_martingale(const Distribution& nu,
                                                   const DiscreteControl& law,
                                                   const DiscreteControl* claimed, int n_steps,
                                                   std::span<const double> z) {
  check_enumeration_pre(nu.size(), n_steps);
  if (static_cast<int>(z.size()) != nu.size())
    throw DimensionMismatch("check_discrete_martingale: z length mismatch");

  DiscreteMartingaleReport report;
  walk_atoms(nu, law, n_steps,
             [&](std::span<const int> prefix, double) {
               const int k = static_cast<int>(prefix.size());
               const int from = prefix.back();
               // E[M_k - M_{k-1} | atom] = E[z_{X_k} | atom] - (P_claimed z)_{X_{k-1}}.
               const StochasticMatrix actual = law(k, prefix);
               const double expected_z = dot(actual.row(from), z);
               double compensator;
               if (claimed) {
                 const StochasticMatrix cl = (*claimed)(k, prefix);
                 compensator = dot(cl.row(from), z);
               } else {
                 compensator = dot(actual.row(from), z);
               }
               report.max_residual =
                   std::max(report.max_residual, std::abs(expected_z - compensator));
               ++report.atoms_checked;
             },
             report.null_branches_skipped);
  return report;
}

ZMartingaleReport check_z_martingale_discrete(const Distribution& nu, const DiscreteControl& ctrl,
                                              const StochasticMatrix& p0, int n_steps) {
  check_enumeration_pre(nu.size(), n_steps);
  if (!p0.strictly_positive())
    throw Error("check_z_martingale_discrete: reference matrix must be strictly positive");

  ZMartingaleReport report;
  const DiscreteControl reference = constant_control(p0);

  // Z_{k-1} on each prefix is rebuilt from the prefix itself, so the walk
  // needs no auxiliary state beyond the visitor below.
  long null_branches = 0;
  double terminal_mass_weighted_z = 0.0;
  walk_atoms(nu, reference, n_steps,
             [&](std::span<const int> prefix, double prob0) {
               const int k = static_cast<int>(prefix.size());
               const int from = prefix.back();
               double z_prev = 1.0;
               for (int l = 1; l < k; ++l) {
                 const StochasticMatrix pl = ctrl(l, prefix.subspan(0, l));
                 z_prev *= pl(prefix[l - 1], prefix[l]) / p0(prefix[l - 1], prefix[l]);
               }
               const StochasticMatrix pk = ctrl(k, prefix);
               // Literal conditional expectation: sum_j P0(i,j) * Z_{k-1} * ratio(j).
               double expected = 0.0;
               for (int j = 0; j < p0.size(); ++j)
                 expected += p0(from, j) * z_prev * (pk(from, j) / p0(from, j));
               report.max_atom_residual =
                   std::max(report.max_atom_residual, std::abs(expected - z_prev));
               ++report.atoms_checked;
               // Accumulate E0[Z_n] over full-length prefixes.
               if (k == n_steps) {
                 for (int j = 0; j < p0.size(); ++j) {
                   const double z_n = z_prev * (pk(from, j) / p0(from, j));
                   terminal_mass_weighted_z += prob0 * p0(from, j) * z_n;
                 }
               }
             },
             null_branches);
  if (n_steps == 0) {
    terminal_mass_weighted_z = 1.0;  // Z_0 = 1 identically
  }
  report.mean_error = std::abs(terminal_mass_weighted_z - 1.0);
  return report;
}

namespace {

// M_t^f with the integral term computed exactly on the piecewise-constant
// intervals; `comp` overrides the compensator generator when non-null.
double dynkin_functional(const JumpTrajectory& traj, const GeneratorMatrix& q0,
                         const CtmcControl* ctrl, const GeneratorMatrix* comp,
                         std::span<const double> f, double t) {
  double integral = 0.0;
  walk_intervals(traj, q0, ctrl,
                 [&](double t0, double t1, int state, const GeneratorMatrix& q, int) {
                   if (t0 >= t) return;
                   const double seg = std::min(t1, t) - t0;
                   const GeneratorMatrix& gen = comp ? *comp : q;
                   double qf = 0.0;
                   for (int j = 0; j < gen.size(); ++j) qf += gen(state, j) * f[j];
                   integral += seg * qf;
                 });
  return f[traj.state_at(t)] - f[traj.state_at(0.0)] - integral;
}

}  // namespace

DynkinReport check_dynkin_mc(const Distribution& nu, const GeneratorMatrix& q0,
                             const CtmcControl* ctrl, const GeneratorMatrix* compensator_override,
                             std::span<const double> f, double horizon, std::uint64_t n_samples,
                             std::uint64_t master_seed, Execution exec) {
  if (static_cast<int>(f.size()) != q0.size())
    throw DimensionMismatch("check_dynkin_mc: f length mismatch");
  if (ctrl && compensator_override)
    throw Error("check_dynkin_mc: compensator override applies to the stationary case only");

  struct Pair {
    double m_t;
    double m_half;
  };
  const std::vector<Pair> values =
      map_samples(n_samples, master_seed, exec, [&](std::uint64_t, CounterRng& rng) {
        const JumpTrajectory traj = simulate_ctmc(nu, q0, ctrl, horizon, rng);
        return Pair{dynkin_functional(traj, q0, ctrl, compensator_override, f, horizon),
                    dynkin_functional(traj, q0, ctrl, compensator_override, f, horizon / 2.0)};
      });

  std::vector<double> terminal(values.size()), increment(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    terminal[i] = values[i].m_t;
    increment[i] = values[i].m_t - values[i].m_half;
  }
  return DynkinReport{mean_stderr(terminal), mean_stderr(increment)};
}

MeanStderr check_mean_one_ctmc(const Distribution& nu, const GeneratorMatrix& q0,
                               const CtmcControl& ctrl, double horizon, std::uint64_t n_samples,
                               std::uint64_t master_seed, Execution exec) {
  const std::vector<double> z =
      map_samples(n_samples, master_seed, exec, [&](std::uint64_t, CounterRng& rng) {
        const JumpTrajectory traj = simulate_ctmc(nu, q0, nullptr, horizon, rng);
        return std::exp(likelihood_ctmc(traj, q0, ctrl).terminal_log());
      });
  return mean_stderr(z);
}

GeneratorLimitReport check_generator_limit(const GeneratorMatrix& q0,
                                           std::span<const double> h_sequence) {
  if (h_sequence.size() < 2)
    throw Error("check_generator_limit needs at least two step sizes");
  for (std::size_t i = 0; i < h_sequence.size(); ++i) {
    if (h_sequence[i] <= 0.0) throw Error("check_generator_limit: h must be positive");
    if (i > 0 && h_sequence[i] >= h_sequence[i - 1])
      throw Error("check_generator_limit: h sequence must be strictly decreasing");
  }

  GeneratorLimitReport report;
  for (double h : h_sequence) {
    const StochasticMatrix ph = transition_matrix(q0, h);
    double dev = 0.0;
    for (int i = 0; i < q0.size(); ++i)
      for (int j = 0; j < q0.size(); ++j) {
        const double quotient = (ph(i, j) - (i == j ? 1.0 : 0.0)) / h;
        dev = std::max(dev, std::abs(quotient - q0(i, j)));
      }
    report.h.push_back(h);
    report.deviation.push_back(dev);
  }
  // The ratio deviation/h tends to a ||Q^2||-type constant as h -> 0; a
  // linear extrapolation from the two largest h estimates that limit, so
  // the C*h bound stays valid for the smaller step sizes (1% slack covers
  // the quadratic remainder).
  const double r1 = report.deviation[0] / report.h[0];
  const double r2 = report.deviation[1] / report.h[1];
  report.slope = r2 + (r2 - r1) * report.h[1] / (report.h[0] - report.h[1]);
  report.monotone_decreasing = true;
  for (std::size_t i = 1; i < report.deviation.size(); ++i)
    if (report.deviation[i] >= report.deviation[i - 1]) report.monotone_decreasing = false;
  report.within_linear_bound = true;
  for (std::size_t i = 0; i < report.deviation.size(); ++i)
    if (report.deviation[i] > report.slope * report.h[i] * 1.01)
      report.within_linear_bound = false;
  return report;
}

}  // namespace girsanov

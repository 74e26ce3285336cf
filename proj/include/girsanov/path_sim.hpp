#pragma once

#include <functional>
#include <span>

#include "girsanov/markov_core.hpp"
#include "girsanov/quadratic_family.hpp"
#include "girsanov/rng.hpp"

namespace girsanov {

/// Predictable transition rule for discrete time: given the step index
/// k >= 1 and the strictly prior history X_0..X_{k-1} (so history.size() == k),
/// produce the transition matrix P_k. Rules must be deterministic functions
/// of their arguments.
using DiscreteControl = std::function<StochasticMatrix(int step, std::span<const int> history)>;

DiscreteControl constant_control(StochasticMatrix p);

/// Jump history visible to a continuous-time control: the initial state and
/// every jump up to and including the most recent one. Coefficients may
/// change only at jump epochs, so rates are constant between jumps.
struct JumpHistory {
  int initial_state;
  std::span<const Jump> jumps;

  int current_state() const { return jumps.empty() ? initial_state : jumps.back().target; }
  int jump_count() const { return static_cast<int>(jumps.size()); }
};

using CtmcControl = std::function<QuadraticCoefficients(const JumpHistory&)>;

CtmcControl constant_coefficients(QuadraticCoefficients c);

/// Sample X_0 ~ nu and then X_k from row X_{k-1} of ctrl(k, X_0..X_{k-1}).
/// Inverse-CDF sampling on cumulative row sums, ties toward the smaller
/// state index. Draw order: one uniform for X_0, one per step.
DiscretePath simulate_discrete(const Distribution& nu, const DiscreteControl& ctrl, int n_steps,
                               CounterRng& rng);

/// Gillespie simulation on [0, T]. In state i under the current generator q:
/// holding time ~ Exponential(-q(i,i)), target j != i with probability
/// q(i,j)/(-q(i,i)); a zero exit rate holds until the horizon. With a control,
/// q is rebuilt from the quadratic family after every jump (evaluated on the
/// history including that jump), so rates are exact piecewise constants.
/// Draw order per jump: holding-time uniform, then target uniform.
JumpTrajectory simulate_ctmc(const Distribution& nu, const GeneratorMatrix& q0,
                             const CtmcControl* ctrl, double horizon, CounterRng& rng);

/// Inverse-CDF draw from a probability row (ties toward smaller index).
int sample_from_row(std::span<const double> probs, double u);

/// Visit the inter-jump intervals of a trajectory with the generator in
/// force on each. fn(t0, t1, state, q, jump_target) is called once per
/// interval in time order; jump_target is the landing state of the jump at
/// t1, or -1 on the final segment ending at the horizon. With ctrl null the
/// generator is q0 throughout (stationary reference law).
template <class Fn>
void walk_intervals(const JumpTrajectory& traj, const GeneratorMatrix& q0, const CtmcControl* ctrl,
                    Fn&& fn) {
  const auto& jumps = traj.jumps();
  int state = traj.initial_state();
  double t0 = 0.0;
  for (std::size_t k = 0; k <= jumps.size(); ++k) {
    const bool has_jump = k < jumps.size();
    const double t1 = has_jump ? jumps[k].time : traj.horizon();
    const int target = has_jump ? jumps[k].target : -1;
    if (ctrl) {
      const JumpHistory hist{traj.initial_state(), std::span(jumps.data(), k)};
      const GeneratorMatrix q = build_quadratic(q0, (*ctrl)(hist));
      fn(t0, t1, state, q, target);
    } else {
      fn(t0, t1, state, q0, target);
    }
    if (has_jump) {
      state = target;
      t0 = t1;
    }
  }
}

}  // namespace girsanov

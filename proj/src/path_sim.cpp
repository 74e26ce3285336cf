#include "girsanov/path_sim.hpp"

#include <cmath>
#include <optional>
#include <utility>

namespace girsanov {

DiscreteControl constant_control(StochasticMatrix p) {
  return [p = std::move(p)](int, std::span<const int>) { return p; };
}

CtmcControl constant_coefficients(QuadraticCoefficients c) {
  return [c = std::move(c)](const JumpHistory&) { return c; };
}

int sample_from_row(std::span<const double> probs, double u) {
  double cum = 0.0;
  int last_positive = -1;
  for (int j = 0; j < static_cast<int>(probs.size()); ++j) {
    if (probs[j] > 0.0) {
      cum += probs[j];
      last_positive = j;
      if (u <= cum) return j;
    }
  }
  // u landed past the accumulated mass by rounding; the row is validated to
  // sum to 1, so the last positive entry takes the remainder.
  return last_positive;
}

DiscretePath simulate_discrete(const Distribution& nu, const DiscreteControl& ctrl, int n_steps,
                               CounterRng& rng) {
  if (n_steps < 0) throw Error("simulate_discrete: negative step count");
  const int n_states = nu.size();
  std::vector<int> states;
  states.reserve(static_cast<std::size_t>(n_steps) + 1);
  states.push_back(sample_from_row(nu.probs(), rng.uniform01()));
  for (int k = 1; k <= n_steps; ++k) {
    const StochasticMatrix pk = ctrl(k, states);
    if (pk.size() != n_states)
      throw DimensionMismatch("simulate_discrete: control matrix size mismatch");
    states.push_back(sample_from_row(pk.row(states.back()), rng.uniform01()));
  }
  return DiscretePath(std::move(states), n_states);
}

namespace {

// Conditional draw of the landing state: walk the off-diagonal rates of row
// `state` against u * exit_rate, ties toward the smaller index.
int sample_jump_target(const GeneratorMatrix& q, int state, double u) {
  const double scaled = u * q.exit_rate(state);
  double cum = 0.0;
  int last_positive = -1;
  for (int j = 0; j < q.size(); ++j) {
    if (j == state) continue;
    const double rate = q(state, j);
    if (rate > 0.0) {
      cum += rate;
      last_positive = j;
      if (scaled <= cum) return j;
    }
  }
  return last_positive;
}

}  // namespace

JumpTrajectory simulate_ctmc(const Distribution& nu, const GeneratorMatrix& q0,
                             const CtmcControl* ctrl, double horizon, CounterRng& rng) {
  if (horizon <= 0.0) throw TimeOutOfRange("simulate_ctmc: horizon must be positive");
  const int n_states = q0.size();
  if (nu.size() != n_states) throw DimensionMismatch("simulate_ctmc: nu size mismatch");

  const int initial_state = sample_from_row(nu.probs(), rng.uniform01());
  int state = initial_state;
  std::vector<Jump> jumps;
  double t = 0.0;
  while (true) {
    std::optional<GeneratorMatrix> controlled;
    const GeneratorMatrix* q = &q0;
    if (ctrl) {
      const JumpHistory hist{initial_state, std::span(jumps.data(), jumps.size())};
      controlled = build_quadratic(q0, (*ctrl)(hist));
      q = &*controlled;
    }
    const double exit = q->exit_rate(state);
    if (exit <= 0.0) break;  // no outgoing rate: hold until the horizon
    const double dt = rng.exponential(exit);
    double t_next = t + dt;
    if (t_next <= t) t_next = std::nextafter(t, 2.0 * horizon);  // dt below ulp(t)
    if (t_next > horizon) break;
    const int target = sample_jump_target(*q, state, rng.uniform01());
    jumps.push_back(Jump{t_next, target});
    state = target;
    t = t_next;
  }
  return JumpTrajectory(initial_state, std::move(jumps), horizon, n_states);
}

}  // namespace girsanov

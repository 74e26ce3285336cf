#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "girsanov/mc.hpp"
#include "girsanov/oracle.hpp"
#include "girsanov/path_sim.hpp"
#include "test_helpers.hpp"

using namespace girsanov;
using namespace girsanov::testing;

TEST_CASE("sample_from_row is deterministic with ties toward smaller index") {
  const std::vector<double> row{0.25, 0.0, 0.75};
  CHECK(sample_from_row(row, 0.0) == 0);
  CHECK(sample_from_row(row, 0.25) == 0);  // boundary goes to the earlier state
  CHECK(sample_from_row(row, 0.2500001) == 2);
  CHECK(sample_from_row(row, 0.999999) == 2);
}

TEST_CASE("simulate_discrete basics") {
  CounterRng rng(1, 0);
  const Distribution nu = Distribution::point_mass(2, 0);

  SUBCASE("n = 0 gives a single initial state") {
    const DiscretePath p = simulate_discrete(nu, constant_control(StochasticMatrix(
                                                     Matrix{{0.5, 0.5}, {0.5, 0.5}})),
                                             0, rng);
    CHECK(p.length() == 1);
    CHECK(p[0] == 0);
  }

  SUBCASE("deterministic alternation") {
    const DiscreteControl swap = constant_control(StochasticMatrix(Matrix{{0, 1}, {1, 0}}));
    const DiscretePath p = simulate_discrete(nu, swap, 3, rng);
    CHECK(p.states()[0] == 0);
    CHECK(p.states()[1] == 1);
    CHECK(p.states()[2] == 0);
    CHECK(p.states()[3] == 1);
  }
}

TEST_CASE("discrete marginals match the enumeration oracle within 4 sigma") {
  CounterRng fixture_rng(31, 0);
  const int n_states = 3, n_steps = 5;
  const std::uint64_t n_samples = 100'000;
  const StochasticMatrix p = random_stochastic(n_states, fixture_rng);
  const Distribution nu(random_probs(n_states, fixture_rng));
  const DiscreteControl ctrl = constant_control(p);

  // Exact marginal of X_n by exhaustive enumeration.
  const WeightedPathSet paths = enumerate_paths(nu, ctrl, n_steps);
  std::vector<double> exact(n_states, 0.0);
  for (const auto& [path, prob] : paths.entries) exact[path.terminal()] += prob;

  const auto samples =
      sample_discrete_batch(nu, p, nullptr, n_steps, n_samples, 99, Execution::Parallel);
  std::vector<double> counts(n_states, 0.0);
  for (const auto& s : samples) counts[s.terminal_state] += 1.0;

  for (int j = 0; j < n_states; ++j) {
    const double emp = counts[j] / static_cast<double>(n_samples);
    const double sigma = std::sqrt(exact[j] * (1.0 - exact[j]) / static_cast<double>(n_samples));
    CHECK(std::abs(emp - exact[j]) <= 4.0 * sigma);
  }
}

TEST_CASE("ctmc simulation holds forever under the zero generator") {
  const GeneratorMatrix zero(Matrix{{0, 0}, {0, 0}});
  for (std::uint64_t i = 0; i < 20; ++i) {
    CounterRng rng(5, i);
    const JumpTrajectory traj = simulate_ctmc(Distribution::uniform(2), zero, nullptr, 1.0, rng);
    CHECK(traj.n_jumps() == 0);
  }
}

TEST_CASE("unit-rate chain sees about one jump per unit time") {
  const GeneratorMatrix q(Matrix{{-1, 1}, {1, -1}});
  const std::uint64_t n = 100'000;
  const auto samples =
      sample_ctmc_batch(Distribution::point_mass(2, 0), q, nullptr, 1.0, n, 7, Execution::Parallel);
  double mean = 0.0;
  for (const auto& s : samples) mean += s.n_jumps;
  mean /= static_cast<double>(n);
  // Jump count is Poisson(1): sd = 1, so 3 sigma of the mean is 3/sqrt(n).
  CHECK(std::abs(mean - 1.0) <= 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("controlled simulation hits the target law's marginal") {
  const GeneratorMatrix q0(Matrix{{-1, 1}, {1, -1}});
  const CtmcControl ctrl = constant_coefficients({{1, 1}, {2, 2}});  // target rates 2
  const std::uint64_t n = 100'000;
  const double expected = (1.0 + std::exp(-4.0)) / 2.0;  // exp(1*q_target) diagonal

  const std::vector<double> hits =
      map_samples(n, 8, Execution::Parallel, [&](std::uint64_t, CounterRng& rng) {
        const JumpTrajectory traj =
            simulate_ctmc(Distribution::point_mass(2, 0), q0, &ctrl, 1.0, rng);
        return traj.final_state() == 0 ? 1.0 : 0.0;
      });
  double emp = 0.0;
  for (double h : hits) emp += h;
  emp /= static_cast<double>(n);
  const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n));
  CHECK(std::abs(emp - expected) <= 3.0 * sigma);
}

TEST_CASE("stationary ctmc marginals match the semigroup oracle within 4 sigma") {
  CounterRng fixture_rng(32, 0);
  const int n_states = 3;
  const GeneratorMatrix q0 = random_generator(n_states, fixture_rng);
  const Distribution nu(random_probs(n_states, fixture_rng));
  const double horizon = 0.8;
  const std::uint64_t n = 100'000;

  const Distribution exact = ctmc_marginal_oracle(q0, nu, horizon);
  const auto samples = sample_ctmc_batch(nu, q0, nullptr, horizon, n, 33, Execution::Parallel);
  std::vector<double> counts(n_states, 0.0);
  for (const auto& s : samples) counts[s.terminal_state] += 1.0;
  for (int j = 0; j < n_states; ++j) {
    const double emp = counts[j] / static_cast<double>(n);
    const double sigma = std::sqrt(exact[j] * (1.0 - exact[j]) / static_cast<double>(n));
    CHECK(std::abs(emp - exact[j]) <= 4.0 * sigma);
  }
}

TEST_CASE("infeasible control coefficients abort the simulation") {
  const GeneratorMatrix q0(Matrix{{-1, 1}, {1, -1}});
  const CtmcControl bad = constant_coefficients({{0, 0}, {-1, -1}});
  CounterRng rng(6, 0);
  CHECK_THROWS_AS(simulate_ctmc(Distribution::uniform(2), q0, &bad, 1.0, rng),
                  InfeasibleCoefficients);
}

TEST_CASE("paths are reproducible from (master_seed, sample_index) alone") {
  const GeneratorMatrix q0(Matrix{{-2, 2}, {1, -1}});
  const Distribution nu = Distribution::uniform(2);

  CounterRng a(42, 7), b(42, 7), c(42, 8);
  const JumpTrajectory ta = simulate_ctmc(nu, q0, nullptr, 2.0, a);
  const JumpTrajectory tb = simulate_ctmc(nu, q0, nullptr, 2.0, b);
  const JumpTrajectory tc = simulate_ctmc(nu, q0, nullptr, 2.0, c);

  CHECK(ta.initial_state() == tb.initial_state());
  REQUIRE(ta.n_jumps() == tb.n_jumps());
  for (int k = 0; k < ta.n_jumps(); ++k) {
    CHECK(ta.jumps()[k].time == tb.jumps()[k].time);  // bit identical
    CHECK(ta.jumps()[k].target == tb.jumps()[k].target);
  }
  const bool differs = ta.n_jumps() != tc.n_jumps() || ta.initial_state() != tc.initial_state() ||
                       (ta.n_jumps() > 0 && ta.jumps()[0].time != tc.jumps()[0].time);
  CHECK(differs);
}

TEST_CASE("history-dependent controls see only the strict past") {
  // The control records the history lengths it is offered; step k must come
  // with exactly k prior states.
  std::vector<int> seen;
  const StochasticMatrix uniform(Matrix{{0.5, 0.5}, {0.5, 0.5}});
  const DiscreteControl probe = [&](int step, std::span<const int> history) {
    CHECK(static_cast<int>(history.size()) == step);
    seen.push_back(step);
    return uniform;
  };
  CounterRng rng(2, 0);
  simulate_discrete(Distribution::uniform(2), probe, 4, rng);
  CHECK(seen == std::vector<int>{1, 2, 3, 4});
}

#include "girsanov/oracle.hpp"

#include <cmath>

#include "girsanov/markov_core.hpp"

namespace girsanov {

double WeightedPathSet::total_mass() const {
  double s = 0.0;
  for (const auto& [path, prob] : entries) s += prob;
  return s;
}

namespace {

void check_enumeration_scale(int n_states, int n_steps) {
  double count = 1.0;
  for (int k = 0; k <= n_steps; ++k) {
    count *= n_states;
    if (count > static_cast<double>(kEnumerationGuard))
      throw ScaleTooLarge("path enumeration would exceed the guard of 10^6 paths");
  }
}

void enumerate_rec(const Distribution& nu, const DiscreteControl& ctrl, int n_steps,
                   std::vector<int>& prefix, double prob, WeightedPathSet& out) {
  const int k = static_cast<int>(prefix.size());  // next step index
  if (k == n_steps + 1) {
    out.entries.emplace_back(DiscretePath(prefix, nu.size()), prob);
    return;
  }
  if (k == 0) {
    for (int x0 = 0; x0 < nu.size(); ++x0) {
      if (nu[x0] <= 0.0) continue;
      prefix.push_back(x0);
      enumerate_rec(nu, ctrl, n_steps, prefix, nu[x0], out);
      prefix.pop_back();
    }
    return;
  }
  const StochasticMatrix pk = ctrl(k, prefix);
  if (pk.size() != nu.size())
    throw DimensionMismatch("enumerate_paths: control matrix size mismatch");
  const int from = prefix.back();
  for (int to = 0; to < pk.size(); ++to) {
    const double step_prob = pk(from, to);
    if (step_prob <= 0.0) continue;
    prefix.push_back(to);
    enumerate_rec(nu, ctrl, n_steps, prefix, prob * step_prob, out);
    prefix.pop_back();
  }
}

}  // namespace

WeightedPathSet enumerate_paths(const Distribution& nu, const DiscreteControl& ctrl, int n_steps) {
  if (n_steps < 0) throw Error("enumerate_paths: negative step count");
  check_enumeration_scale(nu.size(), n_steps);
  WeightedPathSet out;
  std::vector<int> prefix;
  prefix.reserve(static_cast<std::size_t>(n_steps) + 1);
  enumerate_rec(nu, ctrl, n_steps, prefix, 0.0, out);
  return out;
}

double exact_expectation(const WeightedPathSet& paths,
                         const std::function<double(const DiscretePath&)>& functional) {
  double s = 0.0;
  for (const auto& [path, prob] : paths.entries) s += prob * functional(path);
  return s;
}

double pathwise_likelihood_oracle(const DiscretePath& path, const Distribution& nu,
                                  const DiscreteControl& ctrl, const StochasticMatrix& p0) {
  if (!p0.strictly_positive())
    throw Error("pathwise_likelihood_oracle: reference matrix must be strictly positive");
  (void)nu;  // the initial distribution is shared by both laws and cancels
  double target = 1.0, reference = 1.0;
  for (int k = 1; k <= path.n_steps(); ++k) {
    const StochasticMatrix pk = ctrl(k, path.states().subspan(0, k));
    if (pk.size() != path.n_states())
      throw DimensionMismatch("pathwise_likelihood_oracle: control matrix size mismatch");
    target *= pk(path[k - 1], path[k]);
    reference *= p0(path[k - 1], path[k]);
  }
  return target / reference;
}

Distribution ctmc_marginal_oracle(const GeneratorMatrix& q, const Distribution& nu, double t) {
  if (nu.size() != q.size()) throw DimensionMismatch("ctmc_marginal_oracle: nu size mismatch");
  const StochasticMatrix pt = transition_matrix(q, t);
  const int n = q.size();
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (nu[i] == 0.0) continue;
    for (int j = 0; j < n; ++j) out[j] += nu[i] * pt(i, j);
  }
  return Distribution(std::move(out), kComputedRowTolerance);
}

}  // namespace girsanov

#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "girsanov/path_sim.hpp"

namespace girsanov {

// Brute-force ground truth at desk scale. Everything here is computed by a
// route independent of the likelihood engine: direct products of transition
// probabilities over exhaustively enumerated paths, and the semigroup
// exp(TQ) for stationary CTMC marginals.

/// All positive-probability paths of a fixed length with their exact
/// probabilities under the law induced by a control.
struct WeightedPathSet {
  std::vector<std::pair<DiscretePath, double>> entries;

  double total_mass() const;
};

inline constexpr long kEnumerationGuard = 1'000'000;  // max N^(n+1)

/// Enumerate every path x_0..x_n with probability
/// nu(x_0) * prod_k P_k(x_{k-1}, x_k), P_k = ctrl(k, prefix). Zero-probability
/// branches are pruned. Throws ScaleTooLarge past the enumeration guard.
WeightedPathSet enumerate_paths(const Distribution& nu, const DiscreteControl& ctrl, int n_steps);

/// Sum of probability * functional(path) over the path set.
double exact_expectation(const WeightedPathSet& paths,
                         const std::function<double(const DiscretePath&)>& functional);

/// Likelihood ratio of one path as a direct ratio of products of transition
/// probabilities (the initial distribution cancels). P0 must be strictly
/// positive so the denominator cannot vanish.
double pathwise_likelihood_oracle(const DiscretePath& path, const Distribution& nu,
                                  const DiscreteControl& ctrl, const StochasticMatrix& p0);

/// Exact marginal of a stationary CTMC at time T: nu^T exp(TQ).
Distribution ctmc_marginal_oracle(const GeneratorMatrix& q, const Distribution& nu, double t);

}  // namespace girsanov

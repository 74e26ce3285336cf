#pragma once

#include <vector>

#include "girsanov/markov_core.hpp"

namespace girsanov {

/// Per-state coefficients (a_i, b_i) of the quadratic generator family
///   q(i,j) = a_i q0(i,j)^2 + b_i q0(i,j) - (a_i / N) sum_k q0(i,k)^2.
/// Feasibility (the result staying inside the generator cone) depends on q0
/// and is checked by the operations, not at construction.
struct QuadraticCoefficients {
  std::vector<double> a;
  std::vector<double> b;
};

/// Raw family entries for all (i,j), including diagonals, with no cone
/// validation. Row sums vanish identically by the algebra of the family.
Matrix quadratic_entries(const GeneratorMatrix& q0, const QuadraticCoefficients& c);

/// Build and validate the family member. Throws InfeasibleCoefficients if
/// any off-diagonal entry comes out negative.
GeneratorMatrix build_quadratic(const GeneratorMatrix& q0, const QuadraticCoefficients& c);

/// Minimum off-diagonal entry of the raw family matrix. Coefficients are
/// feasible iff the margin is >= 0.
double feasibility_margin(const GeneratorMatrix& q0, const QuadraticCoefficients& c);

}  // namespace girsanov

#pragma once

#include <span>
#include <vector>

#include "girsanov/likelihood.hpp"
#include "girsanov/markov_core.hpp"

namespace girsanov {

// Martingale-representation machinery: recover the coefficients that write a
// centered one-step increment on the basis of centered transition
// indicators, rebuild the transition matrix they imply, and the
// continuous-time Hadamard decomposition q_t = q0 (*) (1 + K).

/// Solve Y(k) = G(k) - sum_j G(j) p0(j) for the coefficient vector G of one
/// atom, returned in the canonical gauge sum_j p0(j) G(j) = 0 (under which
/// G equals Y up to removal of its p0-weighted mean). Y must satisfy the
/// conditional-mean-zero property sum_j p0(j) Y(j) = 0 within tolerance;
/// otherwise NotCenteredError.
std::vector<double> delta_basis_decompose(std::span<const double> y,
                                          std::span<const double> p0_row,
                                          double tolerance = 1e-10);

/// One row of the recovered transition matrix:
///   P(j) = p0(j) * (1 + (G(j) - sum_l G(l) p0(l)) / z_prev).
/// The row sums to 1 by the algebra regardless of G or gauge. Entries below
/// -1e-12 raise NegativeProbability; tiny negative roundoff is clamped to 0.
std::vector<double> recover_transition_row(double z_prev, std::span<const double> g_row,
                                           std::span<const double> p0_row);

/// Whole-matrix recovery: row i of g holds the coefficients for the atom
/// {X_{k-1} = i}; all atoms share z_prev. Result is validated row-stochastic.
StochasticMatrix recover_transition(double z_prev, const Matrix& g, const StochasticMatrix& p0);

/// Multiplicative correction with q_t = q0 (*) (1 + K) entrywise and
/// sum_j q0(i,j) K(i,j) = 0 on every row.
struct HadamardCorrection {
  Matrix k;
};

/// Off-diagonals K(i,j) = qt(i,j)/q0(i,j) - 1; diagonal completed by
/// K(i,i) = -sum_{j != i} q0(i,j) K(i,j) / q0(i,i). Requires strictly
/// positive off-diagonal q0; a zero diagonal rate (absorbing reference row)
/// raises DegenerateReference.
HadamardCorrection hadamard_decompose(const GeneratorMatrix& qt, const GeneratorMatrix& q0);

/// Jump-size coefficients H^j = Z_{t-} (q_t(X_{t-},j)/q0(X_{t-},j) - 1) of
/// the likelihood ratio's martingale representation, evaluated at the left
/// limit of every jump epoch and of the horizon.
struct JumpCoefficientSnapshot {
  double time;                // snapshot time t (jump epoch or horizon)
  int state_before;           // X_{t-}
  double z_minus;             // Z_{t-}
  std::vector<double> h;      // H^j for j != state_before; slot state_before is 0
};

struct JumpCoefficients {
  std::vector<JumpCoefficientSnapshot> snapshots;
  int skipped_zero_likelihood = 0;  // snapshots with Z_{t-} = 0: H is undefined there
};

/// z must be the LikelihoodProcess computed by likelihood_ctmc on the same
/// trajectory with the same control.
JumpCoefficients extract_jump_coefficients(const LikelihoodProcess& z, const JumpTrajectory& traj,
                                           const GeneratorMatrix& q0, const CtmcControl& ctrl);

}  // namespace girsanov

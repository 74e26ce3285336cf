#include "girsanov/representation.hpp"

#include <cmath>
#include <sstream>

namespace girsanov {

std::vector<double> delta_basis_decompose(std::span<const double> y,
                                          std::span<const double> p0_row, double tolerance) {
  if (y.size() != p0_row.size())
    throw DimensionMismatch("delta_basis_decompose: Y and P0 row lengths differ");
  double mean = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) mean += p0_row[j] * y[j];
  if (std::abs(mean) > tolerance) {
    std::ostringstream os;
    os << "increment is not conditionally centered: weighted mean " << mean << " exceeds "
       << tolerance;
    throw NotCenteredError(os.str());
  }
  // Project onto the subspace with p0-weighted mean zero; for exactly
  // centered input this is the identity and G = Y.
  std::vector<double> g(y.begin(), y.end());
  for (double& v : g) v -= mean;
  return g;
}

std::vector<double> recover_transition_row(double z_prev, std::span<const double> g_row,
                                           std::span<const double> p0_row) {
  if (g_row.size() != p0_row.size())
    throw DimensionMismatch("recover_transition_row: G and P0 row lengths differ");
  if (!(z_prev > 0.0)) throw ZeroLikelihood("recover_transition_row: Z_prev must be positive");
  double weighted = 0.0;
  for (std::size_t l = 0; l < g_row.size(); ++l) weighted += g_row[l] * p0_row[l];
  std::vector<double> row(g_row.size());
  for (std::size_t j = 0; j < g_row.size(); ++j) {
    double v = p0_row[j] * (1.0 + (g_row[j] - weighted) / z_prev);
    if (v < -1e-12) {
      std::ostringstream os;
      os << "recovered probability " << v << " at column " << j + 1
         << " is negative; inputs are inconsistent";
      throw NegativeProbability(os.str());
    }
    row[j] = v < 0.0 ? 0.0 : v;
  }
  return row;
}

StochasticMatrix recover_transition(double z_prev, const Matrix& g, const StochasticMatrix& p0) {
  if (g.rows() != p0.size() || g.cols() != p0.size())
    throw DimensionMismatch("recover_transition: coefficient matrix shape mismatch");
  Matrix out(p0.size(), p0.size());
  for (int i = 0; i < p0.size(); ++i) {
    const std::vector<double> row = recover_transition_row(z_prev, g.row(i), p0.row(i));
    for (int j = 0; j < p0.size(); ++j) out(i, j) = row[j];
  }
  return StochasticMatrix(std::move(out), false, kInputRowTolerance);
}

HadamardCorrection hadamard_decompose(const GeneratorMatrix& qt, const GeneratorMatrix& q0) {
  const int n = q0.size();
  if (qt.size() != n) throw DimensionMismatch("hadamard_decompose: generator sizes differ");
  Matrix k(n, n);
  for (int i = 0; i < n; ++i) {
    if (q0(i, i) == 0.0)
      throw DegenerateReference("hadamard_decompose: reference row " + std::to_string(i + 1) +
                                " is absorbing; the diagonal completion is undefined");
    double weighted = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (q0(i, j) == 0.0) {
        // The Hadamard form forces qt to vanish wherever q0 does.
        if (qt(i, j) != 0.0)
          throw Error("hadamard_decompose: target has a rate where the reference has none");
        k(i, j) = 0.0;
        continue;
      }
      k(i, j) = qt(i, j) / q0(i, j) - 1.0;
      weighted += q0(i, j) * k(i, j);
    }
    k(i, i) = -weighted / q0(i, i);
  }
  return HadamardCorrection{std::move(k)};
}

JumpCoefficients extract_jump_coefficients(const LikelihoodProcess& z, const JumpTrajectory& traj,
                                           const GeneratorMatrix& q0, const CtmcControl& ctrl) {
  const std::size_t expected = traj.jumps().size() + 2;  // t=0, each jump, horizon
  if (z.log_values.size() != expected || z.times.size() != expected)
    throw DimensionMismatch(
        "extract_jump_coefficients: likelihood process does not match the trajectory");

  JumpCoefficients out;
  std::size_t k = 0;  // index of the interval-start entry in z
  walk_intervals(traj, q0, &ctrl,
                 [&](double t0, double t1, int state, const GeneratorMatrix& q, int) {
                   const double drift = q0(state, state) - q(state, state);
                   const double log_z_minus = z.log_values[k] - (t1 - t0) * drift;
                   const double z_minus = std::exp(log_z_minus);
                   if (z_minus > 0.0) {
                     JumpCoefficientSnapshot snap;
                     snap.time = t1;
                     snap.state_before = state;
                     snap.z_minus = z_minus;
                     snap.h.assign(q0.size(), 0.0);
                     for (int j = 0; j < q0.size(); ++j) {
                       if (j == state) continue;
                       snap.h[j] = z_minus * (q(state, j) / q0(state, j) - 1.0);
                     }
                     out.snapshots.push_back(std::move(snap));
                   } else {
                     ++out.skipped_zero_likelihood;
                   }
                   ++k;
                 });
  return out;
}

}  // namespace girsanov

#include "girsanov/markov_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace girsanov {

namespace {

std::string row_msg(const char* what, int row_1based, double value, double tol) {
  std::ostringstream os;
  os << what << ": row " << row_1based << " (value " << value << ", tolerance " << tol << ")";
  return os.str();
}

std::string entry_msg(const char* what, int i, int j, double value) {
  std::ostringstream os;
  os << what << ": entry (" << i + 1 << "," << j + 1 << ") = " << value;
  return os.str();
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(static_cast<int>(rows.size())),
      cols_(rows.size() ? static_cast<int>(rows.begin()->size()) : 0) {
  data_.reserve(static_cast<std::size_t>(rows_) * cols_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_)
      throw DimensionMismatch("ragged initializer list for Matrix");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("max_abs_diff: shapes differ");
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

double inf_norm(const Matrix& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
    m = std::max(m, s);
  }
  return m;
}

StateSpace::StateSpace(int n) : n_states(n) {
  if (n < 2) throw Error("state space needs at least 2 states");
}

Distribution::Distribution(std::vector<double> probs, double tolerance) : probs_(std::move(probs)) {
  if (probs_.empty()) throw DimensionMismatch("empty distribution");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] < 0.0)
      throw NegativeEntry(entry_msg("distribution has negative probability", 0,
                                    static_cast<int>(i), probs_[i]));
    sum += probs_[i];
  }
  if (std::abs(sum - 1.0) > tolerance)
    throw RowSumNotOne(row_msg("distribution does not sum to 1", 1, sum, tolerance));
}

Distribution Distribution::point_mass(int n_states, int state) {
  std::vector<double> p(n_states, 0.0);
  p.at(state) = 1.0;
  return Distribution(std::move(p));
}

Distribution Distribution::uniform(int n_states) {
  return Distribution(std::vector<double>(n_states, 1.0 / n_states));
}

StochasticMatrix::StochasticMatrix(Matrix entries, bool require_positive, double row_tolerance)
    : entries_(std::move(entries)) {
  if (!entries_.square()) throw DimensionMismatch("stochastic matrix must be square");
  const int n = entries_.rows();
  strictly_positive_ = true;
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double v = entries_(i, j);
      if (v < 0.0) throw NegativeEntry(entry_msg("negative transition probability", i, j, v));
      if (v == 0.0) {
        strictly_positive_ = false;
        if (require_positive)
          throw ZeroEntryWhenPositivityRequired(
              entry_msg("strictly positive matrix required", i, j, v));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > row_tolerance)
      throw RowSumNotOne(row_msg("row sum is not 1", i + 1, sum, row_tolerance));
  }
}

GeneratorMatrix::GeneratorMatrix(Matrix entries, bool require_positive_offdiag,
                                 double row_tolerance)
    : entries_(std::move(entries)) {
  if (!entries_.square()) throw DimensionMismatch("generator matrix must be square");
  const int n = entries_.rows();
  strictly_positive_offdiag_ = true;
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double v = entries_(i, j);
      if (i != j) {
        if (v < 0.0) throw NegativeOffDiagonal(entry_msg("negative off-diagonal rate", i, j, v));
        if (v == 0.0) {
          strictly_positive_offdiag_ = false;
          if (require_positive_offdiag)
            throw ZeroOffDiagonalWhenPositivityRequired(
                entry_msg("strictly positive off-diagonal required", i, j, v));
        }
      }
      sum += v;
    }
    if (std::abs(sum) > row_tolerance)
      throw RowSumNotZero(row_msg("row sum is not 0", i + 1, sum, row_tolerance));
    // With nonnegative off-diagonals and a zero row sum the diagonal cannot
    // exceed the tolerance; reject if it sneaks positive anyway.
    if (entries_(i, i) > row_tolerance)
      throw NegativeOffDiagonal(entry_msg("positive diagonal rate", i, i, entries_(i, i)));
  }
}

StochasticMatrix validate_stochastic(Matrix entries, bool require_positive, double row_tolerance) {
  return StochasticMatrix(std::move(entries), require_positive, row_tolerance);
}

GeneratorMatrix validate_generator(Matrix entries, bool require_positive_offdiag,
                                   double row_tolerance) {
  return GeneratorMatrix(std::move(entries), require_positive_offdiag, row_tolerance);
}

DiscretePath::DiscretePath(std::vector<int> states, int n_states)
    : states_(std::move(states)), n_states_(n_states) {
  if (states_.empty()) throw DimensionMismatch("path must contain at least X_0");
  for (int s : states_)
    if (s < 0 || s >= n_states_) throw Error("path state index out of range");
}

JumpTrajectory::JumpTrajectory(int initial_state, std::vector<Jump> jumps, double horizon,
                               int n_states)
    : initial_state_(initial_state), jumps_(std::move(jumps)), horizon_(horizon),
      n_states_(n_states) {
  if (horizon_ <= 0.0) throw TimeOutOfRange("horizon must be positive");
  if (initial_state_ < 0 || initial_state_ >= n_states_)
    throw Error("initial state index out of range");
  int prev_state = initial_state_;
  double prev_time = 0.0;
  for (const Jump& j : jumps_) {
    if (j.target < 0 || j.target >= n_states_) throw Error("jump target index out of range");
    if (!(j.time > prev_time)) throw TimeOutOfRange("jump times must be strictly increasing");
    if (j.time > horizon_) throw TimeOutOfRange("jump time beyond horizon");
    if (j.target == prev_state) throw Error("jump must change the state");
    prev_state = j.target;
    prev_time = j.time;
  }
}

int JumpTrajectory::state_at(double t) const {
  if (t < 0.0 || t > horizon_) throw TimeOutOfRange("state_at: time outside [0, horizon]");
  int state = initial_state_;
  for (const Jump& j : jumps_) {
    if (j.time > t) break;
    state = j.target;
  }
  return state;
}

int count_jumps(const JumpTrajectory& traj, int target, double s) {
  if (s < 0.0 || s > traj.horizon()) throw TimeOutOfRange("count_jumps: time outside [0, horizon]");
  if (target < 0 || target >= traj.n_states()) throw Error("count_jumps: state index out of range");
  int n = 0;
  for (const Jump& j : traj.jumps()) {
    if (j.time > s) break;
    if (j.target == target) ++n;
  }
  return n;
}

std::vector<double> apply_generator(const GeneratorMatrix& q, std::span<const double> f) {
  const int n = q.size();
  if (static_cast<int>(f.size()) != n)
    throw DimensionMismatch("apply_generator: vector length does not match state count");
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += q(i, j) * f[j];
    out[i] = s;
  }
  return out;
}

StochasticMatrix transition_matrix(const GeneratorMatrix& q, double h) {
  if (h < 0.0) throw TimeOutOfRange("transition_matrix: h must be nonnegative");
  const int n = q.size();
  if (h == 0.0) return StochasticMatrix(Matrix::identity(n), false, kComputedRowTolerance);

  double rho = 0.0;
  for (int i = 0; i < n; ++i) rho = std::max(rho, q.exit_rate(i));
  if (rho == 0.0) return StochasticMatrix(Matrix::identity(n), false, kComputedRowTolerance);

  // Scale so the shifted nonnegative matrix B = (h/2^s)(Q + rho*I) has
  // row sums (and hence inf-norm) at most 1/2.
  int s = 0;
  double scale = h * rho;
  while (scale > 0.5) {
    scale *= 0.5;
    ++s;
  }
  const double step = h / static_cast<double>(1ULL << s);

  Matrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = step * (q(i, j) + (i == j ? rho : 0.0));

  // Truncated series of exp(B); 13 terms leave a remainder below 1e-15 for
  // ||B|| <= 1/2, comfortably inside the 1e-13 budget. All terms are
  // nonnegative, so no cancellation occurs and the sum stays nonnegative.
  Matrix sum = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= 13; ++k) {
    term = matmul(term, b);
    const double inv = 1.0 / k;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        term(i, j) *= inv;
        sum(i, j) += term(i, j);
      }
  }
  // Undo the diagonal shift: exp(step*Q) = e^{-step*rho} exp(B).
  const double shift = std::exp(-step * rho);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sum(i, j) *= shift;

  for (int k = 0; k < s; ++k) sum = matmul(sum, sum);

  return StochasticMatrix(std::move(sum), false, kComputedRowTolerance);
}

}  // namespace girsanov

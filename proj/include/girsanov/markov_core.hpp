#pragma once

#include <span>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "girsanov/errors.hpp"

namespace girsanov {

// Validation tolerances. User-supplied matrices are exact data and get the
// tight tolerance; matrices produced by floating-point computation get the
// looser one.
inline constexpr double kInputRowTolerance = 1e-12;
inline constexpr double kComputedRowTolerance = 1e-10;

/// Dense row-major matrix of doubles. Everything in this project is desk
/// scale (N of a few), so there is no sparsity or BLAS machinery; storage is
/// inline up to 6x6 so matrix copies in simulation inner loops stay off the
/// allocator. Larger matrices still work, they just spill to the heap.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(int n);

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_ && rows_ > 0; }

  std::span<const double> row(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  boost::container::small_vector<double, 36> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
double max_abs_diff(const Matrix& a, const Matrix& b);
double inf_norm(const Matrix& a);

/// Finite state space {1, ..., N}. States are 1-based in external interfaces
/// (CLI, config files, CSV); the C++ API indexes 0-based.
struct StateSpace {
  explicit StateSpace(int n_states);
  int n_states;
};

/// Probability vector over N states.
class Distribution {
 public:
  explicit Distribution(std::vector<double> probs, double tolerance = kInputRowTolerance);

  static Distribution point_mass(int n_states, int state);
  static Distribution uniform(int n_states);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

/// Row-stochastic transition matrix. Immutable after validation.
class StochasticMatrix {
 public:
  explicit StochasticMatrix(Matrix entries, bool require_positive = false,
                            double row_tolerance = kInputRowTolerance);

  int size() const { return entries_.rows(); }
  double operator()(int i, int j) const { return entries_(i, j); }
  std::span<const double> row(int i) const { return entries_.row(i); }
  const Matrix& entries() const { return entries_; }

  /// True iff every entry is > 0 (computed at validation).
  bool strictly_positive() const { return strictly_positive_; }

 private:
  Matrix entries_;
  bool strictly_positive_;
};

/// Rate matrix: nonnegative off-diagonals, zero row sums, nonpositive
/// diagonal. Immutable after validation.
class GeneratorMatrix {
 public:
  explicit GeneratorMatrix(Matrix entries, bool require_positive_offdiag = false,
                           double row_tolerance = kInputRowTolerance);

  int size() const { return entries_.rows(); }
  double operator()(int i, int j) const { return entries_(i, j); }
  std::span<const double> row(int i) const { return entries_.row(i); }
  const Matrix& entries() const { return entries_; }

  /// Total jump rate out of state i, i.e. -q(i,i).
  double exit_rate(int i) const { return -entries_(i, i); }

  /// True iff every off-diagonal entry is > 0 (computed at validation).
  bool strictly_positive_offdiag() const { return strictly_positive_offdiag_; }

 private:
  Matrix entries_;
  bool strictly_positive_offdiag_;
};

/// Realized discrete-time path X_0, ..., X_n.
class DiscretePath {
 public:
  DiscretePath(std::vector<int> states, int n_states);

  int n_states() const { return n_states_; }
  int length() const { return static_cast<int>(states_.size()); }  // n + 1
  int n_steps() const { return length() - 1; }
  int operator[](int k) const { return states_[k]; }
  std::span<const int> states() const { return states_; }
  int terminal() const { return states_.back(); }

  friend bool operator==(const DiscretePath&, const DiscretePath&) = default;

 private:
  std::vector<int> states_;
  int n_states_;
};

struct Jump {
  double time;
  int target;
};

/// Realized continuous-time trajectory on [0, T]: an initial state plus the
/// time-ordered jumps. Cadlag: the state at a jump time is the jump target.
class JumpTrajectory {
 public:
  JumpTrajectory(int initial_state, std::vector<Jump> jumps, double horizon, int n_states);

  int n_states() const { return n_states_; }
  int initial_state() const { return initial_state_; }
  double horizon() const { return horizon_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  int n_jumps() const { return static_cast<int>(jumps_.size()); }

  int final_state() const { return jumps_.empty() ? initial_state_ : jumps_.back().target; }

  /// State occupied at time t (right-continuous). Throws TimeOutOfRange
  /// unless 0 <= t <= horizon.
  int state_at(double t) const;

 private:
  int initial_state_;
  std::vector<Jump> jumps_;
  double horizon_;
  int n_states_;
};

/// Number of jumps into state `target` with jump time <= s.
int count_jumps(const JumpTrajectory& traj, int target, double s);

// --- validation entry points -------------------------------------------

StochasticMatrix validate_stochastic(Matrix entries, bool require_positive = false,
                                     double row_tolerance = kInputRowTolerance);
GeneratorMatrix validate_generator(Matrix entries, bool require_positive_offdiag = false,
                                   double row_tolerance = kInputRowTolerance);

// --- generator algebra ---------------------------------------------------

/// (Qf)(i) = sum_j Q(i,j) f(j).
std::vector<double> apply_generator(const GeneratorMatrix& q, std::span<const double> f);

/// exp(hQ) by scaling and squaring of the truncated series for the shifted
/// nonnegative matrix h(Q + rho*I); all series terms are nonnegative, so the
/// result is entrywise nonnegative by construction. Row-stochastic within
/// kComputedRowTolerance. Serves as the stationary-case oracle for CTMC
/// transition probabilities.
StochasticMatrix transition_matrix(const GeneratorMatrix& q, double h);

}  // namespace girsanov

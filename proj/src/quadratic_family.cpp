#include "girsanov/quadratic_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace girsanov {

namespace {

void check_dims(const GeneratorMatrix& q0, const QuadraticCoefficients& c) {
  const std::size_t n = static_cast<std::size_t>(q0.size());
  if (c.a.size() != n || c.b.size() != n)
    throw DimensionMismatch("quadratic coefficients must have one (a,b) pair per state");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(c.a[i]) || !std::isfinite(c.b[i]))
      throw Error("quadratic coefficients must be finite");
}

}  // namespace

Matrix quadratic_entries(const GeneratorMatrix& q0, const QuadraticCoefficients& c) {
  check_dims(q0, c);
  const int n = q0.size();
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    // S_i = sum_k q0(i,k)^2, the sum running over all k including k = i.
    double si = 0.0;
    for (int k = 0; k < n; ++k) si += q0(i, k) * q0(i, k);
    const double offset = c.a[i] * si / n;
    for (int j = 0; j < n; ++j)
      out(i, j) = c.a[i] * q0(i, j) * q0(i, j) + c.b[i] * q0(i, j) - offset;
  }
  return out;
}

double feasibility_margin(const GeneratorMatrix& q0, const QuadraticCoefficients& c) {
  const Matrix raw = quadratic_entries(q0, c);
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < raw.rows(); ++i)
    for (int j = 0; j < raw.cols(); ++j)
      if (i != j) margin = std::min(margin, raw(i, j));
  return margin;
}

GeneratorMatrix build_quadratic(const GeneratorMatrix& q0, const QuadraticCoefficients& c) {
  Matrix raw = quadratic_entries(q0, c);
  const int n = raw.rows();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && raw(i, j) < 0.0) {
        std::ostringstream os;
        os << "quadratic family leaves the generator cone at (" << i + 1 << "," << j + 1
           << "): rate " << raw(i, j);
        throw InfeasibleCoefficients(os.str());
      }
  return GeneratorMatrix(std::move(raw), false, kInputRowTolerance);
}

}  // namespace girsanov

#pragma once

#include <stdexcept>
#include <string>

namespace girsanov {

// Base for all domain validation and contract failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Matrix / distribution validation.
struct NegativeEntry : Error { using Error::Error; };
struct RowSumNotOne : Error { using Error::Error; };
struct ZeroEntryWhenPositivityRequired : Error { using Error::Error; };
struct NegativeOffDiagonal : Error { using Error::Error; };
struct RowSumNotZero : Error { using Error::Error; };
struct ZeroOffDiagonalWhenPositivityRequired : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// Quadratic generator family.
struct InfeasibleCoefficients : Error { using Error::Error; };

// Paths and trajectories.
struct TimeOutOfRange : Error { using Error::Error; };

// Representation solver.
struct NotCenteredError : Error { using Error::Error; };
struct ZeroLikelihood : Error { using Error::Error; };
struct NegativeProbability : Error { using Error::Error; };
struct DegenerateReference : Error { using Error::Error; };

// Brute-force enumeration guard.
struct ScaleTooLarge : Error { using Error::Error; };

// Experiment configuration files.
struct ConfigError : Error { using Error::Error; };

}  // namespace girsanov

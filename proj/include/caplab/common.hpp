#pragma once
// Shared error types, tolerances and sentinels used across the library.
//
// All information quantities in this project are measured in bits (log base
// 2). Absolute-continuity failures are reported through +/- infinity
// sentinels instead of exceptions so that bound and diagnostic reports can
// propagate them.

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace caplab {

// Probability vectors must sum to 1 within this tolerance; inputs inside the
// tolerance are renormalized exactly before use.
inline constexpr double kSimplexTol = 1e-9;

// Slack tolerance for bound checks (a bound "holds" when rhs - lhs >= -kBoundTol).
inline constexpr double kBoundTol = 1e-9;

// Default cap on exact enumeration of dataset supports (|Z|^n elements).
inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 20;

inline constexpr double kInfiniteBits = std::numeric_limits<double>::infinity();
inline constexpr double kNegativeInfiniteBits = -std::numeric_limits<double>::infinity();

/// Input violates a documented invariant (bad simplex, bad config, bad joint).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query touched a zero-probability marginal or an empty domain.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact enumeration would exceed the configured cap; callers should switch
/// to the sampling-based estimators.
class CapacityLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A learner or demo object could not be assembled over the given inputs
/// (e.g. the hypothesis space is missing a required member).
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace caplab

#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

/// Index window too small for the requested operation.
class WindowError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Input violates a structural invariant (non-unitary coin, unnormalized state, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical problem: near-singular denominators, conditioning near the unit circle.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A distribution or parameter set does not satisfy the hypotheses of the requested study.
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qwalk

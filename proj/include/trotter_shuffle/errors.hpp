#pragma once

#include <stdexcept>
#include <string>

namespace trotter_shuffle {

/// Non-finite entries, empty inputs, malformed rows.
class InvalidInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public InvalidInput {
  public:
    using InvalidInput::InvalidInput;
};

/// A regime's formulas produce an unusable row (k_n outside [1, n], non-positive norm).
class InfeasibleRegime : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// A documented precondition on a bound or statistic was violated.
class PreconditionError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

} // namespace trotter_shuffle

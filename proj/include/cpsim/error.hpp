#pragma once

#include <stdexcept>
#include <string>

namespace cpsim {

/// Bad caller-supplied arguments (invalid vertex, odd half-edge count, ...).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An operation was called in a state where it cannot proceed.
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

/// A checked structural invariant failed at runtime.
struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

/// Argument outside the mathematical domain of a function.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace cpsim

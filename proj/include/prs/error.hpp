#pragma once

#include <stdexcept>
#include <string>

namespace prs {

/// Rejected input: bad counts, out-of-range parameters, malformed configuration.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed: bracket not found, iteration cap hit,
/// singular factorization, residual above tolerance.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace prs

#pragma once

#include <stdexcept>
#include <string>

namespace cvqec {

// Base for every error raised by the library. The CLI maps the three
// families below onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-domain parameters or malformed configuration (exit code 2).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// A computed object failed a physical or consistency check (exit code 3).
class ValidationFailure : public Error {
 public:
  using Error::Error;
};

// Characterization found the probed channel outside the linearity tolerance.
class NonlinearChannel : public ValidationFailure {
 public:
  using ValidationFailure::ValidationFailure;
};

// A covariance matrix violates the bona-fide condition.
class InvalidChannel : public ValidationFailure {
 public:
  using ValidationFailure::ValidationFailure;
};

// Iterative numerics did not converge, or produced non-finite output (exit code 4).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace cvqec

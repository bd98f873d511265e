#pragma once

#include <stdexcept>
#include <string>

namespace histspec {

// Error taxonomy mirrored by the CLI exit codes: validation -> 2,
// resource -> 3, solver non-convergence -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, double residual)
      : Error(msg), residual_achieved(residual) {}
  double residual_achieved;
};

}  // namespace histspec

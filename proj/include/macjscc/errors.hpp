#pragma once

#include <stdexcept>
#include <string>

namespace macjscc {

// Raised when caller-supplied data violates a documented precondition.
// The command line tool maps this to exit code 2.
class input_error : public std::invalid_argument {
 public:
  explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when a computation cannot be completed to the documented accuracy
// (singular matrices, non-converged solvers, invalid densities).  The command
// line tool maps this to exit code 3.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace macjscc

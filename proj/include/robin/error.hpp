#pragma once

#include <stdexcept>
#include <string>

namespace robin {

// Argument outside the mathematical domain of a function (non-finite, negative order, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller violated an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Iterative method failed to converge within its budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mesh generation could not reach the requested quality.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested quantity lies outside the range the discretization resolves.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace robin

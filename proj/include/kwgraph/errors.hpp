#pragma once

#include <stdexcept>

namespace kwg {

// Malformed or inconsistent input document (graph, function or run config).
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data violates a standing assumption of the solver, e.g. h > 0 somewhere.
class HypothesisViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operator evaluated outside its domain: vertex outside the level, on the
// truncation shell, missing level context, unsupported function.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Integrator or linear-solver breakdown.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kwg

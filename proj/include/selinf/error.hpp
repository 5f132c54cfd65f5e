#pragma once

#include <stdexcept>
#include <string>

namespace selinf {

/// Argument outside the mathematical domain of a function (e.g. q = 0 for a quantile).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent user input (truncation sets, designs, flags).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation is not defined for the given parameters, e.g. conditioning on
/// X + U = v when the randomization variance is zero.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An iterative method failed to reach its tolerance.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Lasso selected the empty model; no selective interval is defined.
class NoSelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal consistency failure: observed data outside its own selection event.
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace selinf

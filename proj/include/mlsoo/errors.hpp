#pragma once

#include <stdexcept>
#include <string>

namespace mlsoo {

/// Invalid run configuration (budget, schedule, unknown config key, ...).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The objective produced something the optimizer cannot order (NaN).
class ObjectiveError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// No analytic solution exists for the requested instance.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// An iterative numerical routine failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace mlsoo

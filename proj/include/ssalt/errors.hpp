#pragma once

#include <stdexcept>
#include <string>

namespace ssalt {

// Input outside the mathematical domain of an operation (negative time,
// probability outside (0,1), non-finite stress, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or inconsistent observations.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Some cause/stress-level cell has no failures, so the likelihood has no
// finite maximiser.
class NonIdentifiable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sampler could not find a finite starting point.
class InitialisationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every Monte Carlo replicate at a design point was discarded.
class CriterionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configuration value violates a module precondition. The message names
// the module and the violated condition.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& module, const std::string& what)
      : std::invalid_argument(module + ": " + what) {}
};

}  // namespace ssalt

#pragma once

#include <stdexcept>
#include <string>

namespace pameq {

// Raised when a numeric quantity becomes non-finite mid-computation.
// Carries the 1-based iteration (or sample) index at which it happened.
class NumericFault : public std::runtime_error {
 public:
  NumericFault(const std::string& what, long long iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) +
                           ")"),
        iteration_(iteration) {}
  long long iteration() const { return iteration_; }

 private:
  long long iteration_;
};

// Raised when a linear solve meets a singular or numerically unusable
// matrix; carries the condition estimate that triggered the rejection.
class SingularMatrix : public std::runtime_error {
 public:
  SingularMatrix(const std::string& what, double condition_estimate)
      : std::runtime_error(what + " (condition estimate " +
                           std::to_string(condition_estimate) + ")"),
        condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

// Raised when an iterative trainer's cost grows past its divergence guard.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for malformed config files; carries the offending line number
// (0 when the problem is not tied to a specific line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0
                               ? "line " + std::to_string(line) + ": " + what
                               : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Wraps any error escaping a pipeline stage so the failing stage is named.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error("stage '" + stage + "': " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace pameq

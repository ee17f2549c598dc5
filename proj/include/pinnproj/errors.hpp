#pragma once

#include <stdexcept>
#include <string>

namespace pinnproj {

/// Math-domain violation inside jet or interpolation arithmetic.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke an API precondition (shape mismatch, empty tape, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent or incomplete configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The nearest point on the constraint set is not unique (input at the
/// centre of the sphere).
class DegenerateProjection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The sphere/hyperplane intersection is empty or has zero radius.
class InfeasibleConstraints : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverBlowUp : public std::runtime_error {
 public:
  SolverBlowUp(const std::string& solver, long step)
      : std::runtime_error(solver + ": non-finite state at step " + std::to_string(step)),
        step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace pinnproj

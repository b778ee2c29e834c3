#pragma once

#include <stdexcept>
#include <string>

namespace ssgap {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A parameter combination for which a gap route is not valid.
class RouteValidityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Kernel evaluated at a point where it has no finite value.
class SingularPointError : public DomainError {
 public:
  using DomainError::DomainError;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A truncated series was asked for a coordinate where its tail is too large.
class AccuracyError : public NumericError {
 public:
  AccuracyError(const std::string& what, double estimate)
      : NumericError(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

class IntegrationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class StiffnessError : public IntegrationError {
 public:
  using IntegrationError::IntegrationError;
};

/// The radicand of a second-degree ODE went negative.
class BranchError : public NumericError {
 public:
  BranchError(const std::string& what, double location)
      : NumericError(what), location_(location) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

/// A Hamiltonian flow ran into a movable pole.
class PoleError : public IntegrationError {
 public:
  PoleError(const std::string& what, double location)
      : IntegrationError(what), location_(location) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

/// Canonical variables cannot be recovered from (h, h', h'') at this point.
class DegenerateRecoveryError : public NumericError {
 public:
  using NumericError::NumericError;
};

class TransformSingularError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace ssgap

#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lfsys {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or malformed numeric input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A field was evaluated outside the set it is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The request is well-formed but outside what the library handles.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Step-size underflow or a non-finite derivative. Carries the last accepted
/// point so callers can report how far the run got.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, double t, Eigen::VectorXd state)
      : Error(what), last_time_(t), last_state_(std::move(state)) {}

  double last_time() const { return last_time_; }
  const Eigen::VectorXd& last_state() const { return last_state_; }

 private:
  double last_time_;
  Eigen::VectorXd last_state_;
};

/// A construction whose preconditions held numerically but whose result
/// failed a consistency check (e.g. a periodic orbit that does not return).
class ConstructionFailure : public Error {
 public:
  using Error::Error;
};

class VerificationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace lfsys

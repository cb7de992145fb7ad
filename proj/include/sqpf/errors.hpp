#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sqpf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: network data, distributions, configuration files.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg, std::string field = {})
      : Error(field.empty() ? msg : field + ": " + msg), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class DisconnectedNetworkError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A construction produced something that violates its own postcondition.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class EnumerationBoundError : public Error {
 public:
  using Error::Error;
};

/// IQAE hit its round cap. Carries the last amplitude interval.
class EstimationFailure : public Error {
 public:
  EstimationFailure(const std::string& msg, double a_low, double a_high)
      : Error(msg), a_low_(a_low), a_high_(a_high) {}
  double a_low() const noexcept { return a_low_; }
  double a_high() const noexcept { return a_high_; }

 private:
  double a_low_;
  double a_high_;
};

}  // namespace sqpf

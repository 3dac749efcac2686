#pragma once

#include <stdexcept>
#include <string>

namespace crossguard {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Metrics requested over zero samples.
class EmptySampleError : public Error {
 public:
  using Error::Error;
};

// Counts that contradict each other (e.g. more misses than frames).
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Stale, duplicate or otherwise out-of-order timestamps.
class OrderingError : public Error {
 public:
  using Error::Error;
};

// An ETA was required but the estimate has no velocity.
class UnavailableEstimateError : public Error {
 public:
  using Error::Error;
};

// Carries the name of the offending field so callers can report it.
class FieldError : public Error {
 public:
  FieldError(std::string field, std::string detail)
      : Error(field.empty() ? detail : field + ": " + detail),
        field_(std::move(field)),
        detail_(std::move(detail)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string field_;
  std::string detail_;
};

// Malformed detector wire record.
class ParseError : public FieldError {
 public:
  using FieldError::FieldError;
};

// Scenario file failed schema or invariant checks.
class ValidationError : public FieldError {
 public:
  using FieldError::FieldError;
};

}  // namespace crossguard

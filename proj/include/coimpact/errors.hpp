#pragma once

#include <stdexcept>
#include <string>

namespace coimpact {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: arguments outside a function's domain, malformed data,
/// inconsistent configuration. The CLI maps these to exit status 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InsufficientDataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class PartitionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A numerical procedure failed on otherwise valid input. Exit status 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ZeroVarianceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateRegressionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class CalibrationInfeasibleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitFailureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace coimpact

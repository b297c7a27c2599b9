#pragma once

#include <stdexcept>
#include <string>

namespace rotbec {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input parameters or configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the regime where a ground state exists (exit code 2).
class RegimeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Iteration failed to converge or produced non-finite values (exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A geometric quantity left the computational domain (exit code 3).
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A resolution or boundary-mass accuracy gate failed (exit code 4).
class AccuracyError : public Error {
 public:
  using Error::Error;
};

}  // namespace rotbec

#pragma once

#include <stdexcept>
#include <string>

namespace flr {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input values: negative sizes, non-finite data, out-of-range levels.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inputs that do not fit together: grid mismatch, length mismatch.
class StructuralError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Invalid configuration: unknown keys, illegal filter parameters.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// The math is well posed but has no useful answer: rank-0 fits,
// degenerate normalizers, degrees-of-freedom exhaustion.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace flr

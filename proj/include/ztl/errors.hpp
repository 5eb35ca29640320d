#pragma once

#include <stdexcept>
#include <string>

namespace ztl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at (or numerically on top of) a pole.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Inputs beyond the supported desk-scale range.
class RangeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Twist parameters h and k share a prime factor.
class NonCoprimeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Trial division up to the configured bound did not split the input.
class UnfactorableError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Shift configuration too close to a confluence for a closed form that
/// assumes separated shifts.
class ConfluentShiftError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace ztl

#pragma once

#include <stdexcept>
#include <string>

namespace wgapdc {

/// Base class for every error raised by the library. The CLI maps any
/// `Error` to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside a model's validity window (wavelength, temperature).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition on an operation's arguments.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration (including parse errors).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A state with zero total power where a normalizable one is required.
class EmptyStateError : public Error {
 public:
  using Error::Error;
};

/// Caller handed an object in the wrong state (e.g. an unnormalized tensor).
class ContractError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace wgapdc

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wsvie {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a function (t outside [0,T), off-grid time, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

// Requested size exceeds the allocation guard.
class CapacityError : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

// Inconsistent configuration, e.g. a Brownian grid that does not contain the half-cell points.
class ConfigError : public Error {
public:
  using Error::Error;
};

class SingularSystemError : public Error {
public:
  SingularSystemError(std::size_t pivot, const std::string& what)
      : Error(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

private:
  std::size_t pivot_;
};

// Failure while evaluating a user-supplied field; the message names the cell or position.
class EvaluationError : public Error {
public:
  using Error::Error;
};

class ConvergenceError : public Error {
public:
  using Error::Error;
};

} // namespace wsvie

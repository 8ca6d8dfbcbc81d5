#pragma once

#include <stdexcept>
#include <string>

namespace kdetrack {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data that violates a precondition (ordering, dimension, finiteness).
class DataError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

// Heading comparison against a zero-length velocity.
class ZeroVelocityError : public DataError {
 public:
  using DataError::DataError;
};

// Pathfinding failures: infeasible endpoints or a disconnected mask.
class PathError : public DataError {
 public:
  using DataError::DataError;
};

// A density or estimator has nothing to work with.
class NoSupportError : public DataError {
 public:
  using DataError::DataError;
};

// Stage 1 found no historical analogue of the current state.
class NoAnaloguesError : public Error {
 public:
  using Error::Error;
};

void require_dimension(std::size_t expected, std::size_t actual, const char* what);

}  // namespace kdetrack

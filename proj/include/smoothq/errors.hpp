#pragma once

#include <stdexcept>
#include <string>

namespace smoothq {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested quantity is not defined for the given model kind
/// (e.g. a density for an empirical model).
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// Bracket expansion failed to enclose a sign change.
class NoRootError : public Error {
 public:
  using Error::Error;
};

/// A computed parameter left its admissible interval.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

class EmptySampleError : public Error {
 public:
  using Error::Error;
};

/// Sample has no spread where spread is required (e.g. all values equal).
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unusable input data (CSV parsing, bad prices, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace smoothq

#pragma once

#include <stdexcept>
#include <string>

namespace idpdb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix shapes disagree with the network architecture.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Reading or writing an artifact failed, or its contents are malformed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Training diverged (non-finite loss).
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// The MILP backend reported a failure it could not recover from.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace idpdb

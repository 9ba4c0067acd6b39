#pragma once

#include <stdexcept>
#include <string>

namespace lexcomp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input files. Messages carry the file path and
/// line number when one is known.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A computation whose preconditions do not hold for the given data
/// (constant vectors, single-class labels, singular systems, ...).
class ComputationError : public Error {
 public:
  using Error::Error;
};

/// Bad command-line or configuration values.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace lexcomp

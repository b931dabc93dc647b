#pragma once

#include <stdexcept>
#include <string>

namespace lpdo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shared index ids with different dimensions, or shape mismatches.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Requested work would exceed a hard resource cap (dense oracle size).
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A numerical evaluation produced a non-finite value.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lpdo

#pragma once

#include <stdexcept>
#include <string>

namespace psdcone {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An operation that needs square roots or eigenvalues was called on the
/// exact backend.
class BackendError : public Error {
 public:
  using Error::Error;
};

class NotPsd : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// Range inclusion fails, so no Douglas factor exists.
class NoFactor : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A seeded generator could not certify its postcondition within the retry
/// budget.
class RetryExhausted : public Error {
 public:
  using Error::Error;
};

/// A line map is not induced by an invertible semilinear operator.
class NotSemilinear : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(a) +
                            " vs " + std::to_string(b));
}

}  // namespace psdcone

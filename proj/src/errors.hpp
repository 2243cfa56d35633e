#pragma once

#include <stdexcept>
#include <string>

namespace mixgbn {

// Base of every exception thrown by the engine. The C API maps the
// concrete subclass onto a status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments, malformed input files, violated preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a special function.
class DomainError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Cholesky met a non-positive pivot.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mixgbn

#pragma once

#include <stdexcept>
#include <string>

namespace earlystop {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An input value or structure violates a documented invariant.
struct ValidationError : Error {
  using Error::Error;
};

// An argument combination is outside an operation's domain.
struct DomainError : Error {
  using Error::Error;
};

// A file could not be parsed; the message carries the offending location.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace earlystop

#pragma once

#include <stdexcept>
#include <string>

namespace rbn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

/// Raised when an exhaustive enumeration over 2^I inputs exceeds the cap.
class InputSpaceTooLargeError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace rbn

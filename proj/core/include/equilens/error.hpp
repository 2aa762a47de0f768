#pragma once

#include <stdexcept>
#include <string>

namespace equilens {

// Base for every error raised by the library. The CLI maps these to exit
// code 1 (user error); anything else escaping a command is exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or lengths that do not agree with each other or with a group spec.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed values: NaN entries, out-of-range parameters, invalid specs.
class InputError : public Error {
 public:
  using Error::Error;
};

// Group too large for full enumeration.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Unreadable or malformed files.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace equilens

#pragma once

#include <stdexcept>
#include <string>

namespace gouda {

// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration values. The message names the field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable/unwritable files and malformed file contents.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gouda

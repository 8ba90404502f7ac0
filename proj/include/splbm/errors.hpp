#pragma once

#include <stdexcept>
#include <string>

namespace splbm {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (geometry files, config files).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line, long column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line(line),
        column(column) {}
  explicit ParseError(const std::string& what) : Error(what), line(0), column(0) {}

  long line;
  long column;
};

/// Invalid configuration or parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Mathematical domain violation (e.g. zero density where a division follows).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values detected during time stepping.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, long step)
      : Error(what + " at step " + std::to_string(step)), step(step) {}

  long step;
};

/// File system / stream failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace splbm

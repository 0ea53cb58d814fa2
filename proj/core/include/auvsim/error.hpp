#pragma once

#include <stdexcept>
#include <string>

namespace auvsim {

/// Base for all errors raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-schema configuration; carries the offending line when known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0, const std::string& source = {})
      : Error(format(what, line, source)), line_(line) {}
  int line() const { return line_; }

 private:
  static std::string format(const std::string& what, int line, const std::string& source) {
    std::string where = source;
    if (line > 0) where += (where.empty() ? "line " : ":") + std::to_string(line);
    return where.empty() ? what : where + ": " + what;
  }
  int line_;
};

/// NaN/Inf produced by the physics.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Input data problems (unreadable files, holes in a grid, queries outside a tileset).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace auvsim

#pragma once

#include <stdexcept>
#include <string>

namespace fsorf {

/// Base class for all library errors. The C API maps each subclass onto a
/// distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Contour quadrature failed to meet its tolerance, or no admissible contour
/// exists for the requested parameters.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration (sweep files, link parameters, sim plans).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string key = {})
      : Error(what), line_(line), key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

}  // namespace fsorf

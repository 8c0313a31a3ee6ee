#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aeroqa {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value broke a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed textual input. `line()` is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Pattern files, templates, command-line configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Transport failures and protocol violations from the model sidecar.
class RemoteError : public Error {
 public:
  using Error::Error;
};

// Input contained nothing linkable once stopwords were removed.
class NoMentionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace aeroqa

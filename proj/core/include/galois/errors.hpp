#pragma once

#include <stdexcept>
#include <string>

namespace galois {

// Base class for every error the engine raises on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed query or data text. Position is 1-based; 0 means unknown.
struct ParseError : Error {
  ParseError(const std::string& message, int line = 0, int column = 0)
      : Error(decorate(message, line, column)), line(line), column(column) {}

  int line;
  int column;

 private:
  static std::string decorate(const std::string& message, int line, int column) {
    if (line <= 0) return message;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) +
           ": " + message;
  }
};

// SQL construct we recognize but deliberately do not accept.
struct UnsupportedError : Error {
  UnsupportedError(const std::string& construct, int line = 0, int column = 0)
      : Error("unsupported construct: " + construct),
        construct(construct),
        line(line),
        column(column) {}

  std::string construct;
  int line;
  int column;
};

// Schema or fixture files that fail their structural checks.
struct ValidationError : Error {
  using Error::Error;
};

// Query references that do not resolve against the catalog.
struct BindError : Error {
  using Error::Error;
};

// Plans that violate a lowering rule (for example fetching from a local table).
struct PlanError : Error {
  using Error::Error;
};

// Runtime failures during plan execution that are not backend transport errors.
struct ExecError : Error {
  using Error::Error;
};

// Transport or protocol failure talking to a model backend.
struct BackendError : Error {
  explicit BackendError(const std::string& message, int status = 0)
      : Error(message), status(status) {}

  int status;  // HTTP status when one was received, otherwise 0
};

}  // namespace galois

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chainunify {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A term or equation violates the two-sorted signature.
class SortError : public Error {
 public:
  using Error::Error;
};

/// A symbol is not admitted by the selected theory (e.g. `g` under bc1).
class SignatureError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Raised when a search exhausts its configured branch or node budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class InconsistentInput : public Error {
 public:
  using Error::Error;
};

/// Malformed input to the 1-in-3 encoder.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace chainunify

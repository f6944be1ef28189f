#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bayeslab {

/// Invalid argument to a numerical routine or a value type constructor.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation not allowed in the object's current state (e.g. changing a locked prior).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An iterative routine ran out of iterations.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally malformed input document (missing header, bad JSON shape).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A single row of delimited input failed validation.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line),
        reason_(message) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

}  // namespace bayeslab

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qsis {

// Base of every domain error raised by the library. The CLI maps these to
// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number (0 when the problem is
// not tied to a single line).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Numerical trajectory left the probability cube or produced NaN.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace qsis

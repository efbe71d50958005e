#pragma once

#include <stdexcept>
#include <string>

namespace unisvm {

/// Invalid arguments or malformed user input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text-format parsing failure; carries the 1-based line number.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, long line)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

/// Numerical breakdown: non-PSD residual, singular factorization,
/// non-finite iterates.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured resource guard tripped (e.g. the dense Gram cap).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace unisvm

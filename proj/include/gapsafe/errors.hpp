#pragma once

#include <stdexcept>
#include <string>

namespace gapsafe {

// Caller passed arguments that violate a documented precondition
// (dimension mismatch, non-positive lambda, T < 2, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Column or row index outside the matrix.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// An input violates a mathematical contract the callee relies on,
// e.g. an infeasible dual point handed to the dual objective.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Floating point results that contradict an identity beyond tolerance
// (negative duality gap, inner radius above outer radius).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed dataset file. The message carries the line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The reference solver could not reach its accuracy target.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gapsafe

#pragma once

#include <stdexcept>
#include <string>

namespace drlaed {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (bad network, bad config, bad file).
class InputError : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public InputError {
public:
  using InputError::InputError;
};

class InvalidNetwork : public InputError {
public:
  using InputError::InputError;
};

class MissingInitialSetpoint : public InputError {
public:
  using InputError::InputError;
};

class EmptyInput : public InputError {
public:
  using InputError::InputError;
};

class InvalidBounds : public InputError {
public:
  using InputError::InputError;
};

class UnsupportedNorm : public InputError {
public:
  using InputError::InputError;
};

/// Parse failure with a position inside the offending file.
class ParseError : public InputError {
public:
  ParseError(const std::string &what, std::size_t line, std::size_t column)
      : InputError(what + " (line " + std::to_string(line) + ", column " +
                   std::to_string(column) + ")"),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/// The reduced nodal susceptance matrix cannot be factored.
class SingularNetwork : public Error {
public:
  using Error::Error;
};

/// Simplex factorization failure or iteration-cap overrun.
class NumericalBreakdown : public Error {
public:
  using Error::Error;
};

/// A dispatch solve failed for reasons other than infeasibility/unboundedness.
class SolverFailure : public Error {
public:
  using Error::Error;
};

} // namespace drlaed

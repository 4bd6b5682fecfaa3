#pragma once

#include <stdexcept>
#include <string>

namespace hjlab {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDomainError : public Error { using Error::Error; };
class ResolutionError : public Error { using Error::Error; };
class InputError : public Error { using Error::Error; };
class StabilityError : public Error { using Error::Error; };
class SolverError : public Error { using Error::Error; };
class RangeError : public Error { using Error::Error; };
class CompatibilityError : public Error { using Error::Error; };
class HypothesisError : public Error { using Error::Error; };
class DegenerateFitError : public Error { using Error::Error; };
class CatalogError : public Error { using Error::Error; };
class ValidationError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

// Raised when the discrete density goes negative. Signals a bug, never bad input.
class PositivityFault : public Error { using Error::Error; };

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace hjlab

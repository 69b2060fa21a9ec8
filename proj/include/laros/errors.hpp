#pragma once

#include <stdexcept>
#include <string>

namespace laros {

/// Input matrix violates a structural requirement (non-finite, wrong shape,
/// zero where a nonzero matrix is needed, negative where A >= 0 is assumed).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A scalar parameter is out of its admissible range.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The constraint <A, X> >= level cannot be formed because A = 0.
class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation's documented precondition on a solution or model failed.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Dual certificate requested from a solver state that has not converged.
class CertificateUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An inner solve stopped at its iteration limit without a certificate.
class ConvergenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed matrix file. Carries the 1-based line number of the offence.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace laros

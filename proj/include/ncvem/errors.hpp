#pragma once

#include <stdexcept>
#include <string>

namespace ncvem {

/// Failure categories raised by the library.
enum class ErrorKind {
  InvalidArgument,
  GenerationFailure,
  ParseError,
  QuadratureError,
  NumericError,
  CoefficientError,
  SolverError,
  IoError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::GenerationFailure: return "generation-failure";
    case ErrorKind::ParseError: return "parse-error";
    case ErrorKind::QuadratureError: return "quadrature-error";
    case ErrorKind::NumericError: return "numeric-error";
    case ErrorKind::CoefficientError: return "coefficient-error";
    case ErrorKind::SolverError: return "solver-error";
    case ErrorKind::IoError: return "io-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace ncvem

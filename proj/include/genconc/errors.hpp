#pragma once

#include <stdexcept>
#include <string>

namespace genconc {

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  Dimension,
  Validation,
  DegenerateInput,
  Domain,
  Unsupported,
  NumericalFailure,
  NotInFamily,
  NotInClass,
  NotTwoLevel,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Projection onto a family subspace left a residual above tolerance.
class NotInFamilyError : public Error {
 public:
  NotInFamilyError(const std::string& what, double residual)
      : Error(ErrorKind::NotInFamily, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::NotInFamily: return "not-in-family";
    case ErrorKind::NotInClass: return "not-in-class";
    case ErrorKind::NotTwoLevel: return "not-two-level";
  }
  return "unknown";
}

}  // namespace genconc

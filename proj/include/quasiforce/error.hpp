#pragma once

#include <stdexcept>
#include <string>

namespace qforce {

enum class ErrorKind {
  UsageError,
  RootMismatch,
  ParallelRootEdge,
  ExpansionTooLarge,
  TooLarge,
  BudgetExceeded,
  NotMinimal,
  BadSplit,
  OutOfRange,
  PreconditionViolated,
  IrrationalMeasures,
  DegreesNotDistinct,
  Singular,
  NoConvergence,
  ConstraintViolated,
  NotAGraphon,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::UsageError: return "UsageError";
    case ErrorKind::RootMismatch: return "RootMismatch";
    case ErrorKind::ParallelRootEdge: return "ParallelRootEdge";
    case ErrorKind::ExpansionTooLarge: return "ExpansionTooLarge";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NotMinimal: return "NotMinimal";
    case ErrorKind::BadSplit: return "BadSplit";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::IrrationalMeasures: return "IrrationalMeasures";
    case ErrorKind::DegreesNotDistinct: return "DegreesNotDistinct";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ConstraintViolated: return "ConstraintViolated";
    case ErrorKind::NotAGraphon: return "NotAGraphon";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace qforce

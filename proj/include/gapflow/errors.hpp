#pragma once

#include <stdexcept>
#include <string>

namespace gapflow {

enum class ErrorCode {
  NegativeMass,
  NanPosition,
  EmptySupport,
  EmptyMeasure,
  NonAtomicMeasure,
  StartOutsideHull,
  RateOverflow,
  MeanMismatch,
  UnknownMean,
  WrongEngine,
  MissingDeclaration,
  ConvexityViolation,
  NegativeTailMass,
  BudgetExceeded,
  Parse,
  Validation,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NegativeMass: return "E_NEGATIVE_MASS";
    case ErrorCode::NanPosition: return "E_NAN_POSITION";
    case ErrorCode::EmptySupport: return "E_EMPTY_SUPPORT";
    case ErrorCode::EmptyMeasure: return "E_EMPTY_MEASURE";
    case ErrorCode::NonAtomicMeasure: return "E_NON_ATOMIC";
    case ErrorCode::StartOutsideHull: return "E_START_OUTSIDE_HULL";
    case ErrorCode::RateOverflow: return "E_RATE_OVERFLOW";
    case ErrorCode::MeanMismatch: return "E_MEAN_MISMATCH";
    case ErrorCode::UnknownMean: return "E_UNKNOWN_MEAN";
    case ErrorCode::WrongEngine: return "E_WRONG_ENGINE";
    case ErrorCode::MissingDeclaration: return "E_MISSING_DECLARATION";
    case ErrorCode::ConvexityViolation: return "E_CONVEXITY_VIOLATION";
    case ErrorCode::NegativeTailMass: return "E_NEGATIVE_TAIL_MASS";
    case ErrorCode::BudgetExceeded: return "E_BUDGET_EXCEEDED";
    case ErrorCode::Parse: return "E_PARSE";
    case ErrorCode::Validation: return "E_VALIDATE";
  }
  return "E_UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gapflow

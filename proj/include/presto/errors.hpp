#pragma once

#include <stdexcept>
#include <string>

namespace presto {

enum class ErrorCode {
  BadProbability,
  MomentViolation,
  SizeLimit,
  ShapeMismatch,
  BadArgument,
  NoContraction,
  NoConvergence,
  BadStoppingTime,
  InvalidAlpha,
  BudgetExceeded,
  NotASupermartingale,
  Measurability,
  UnknownDriver,
  ParseError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadProbability: return "BAD_PROBABILITY";
    case ErrorCode::MomentViolation: return "MOMENT_VIOLATION";
    case ErrorCode::SizeLimit: return "SIZE_LIMIT";
    case ErrorCode::ShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::BadArgument: return "BAD_ARGUMENT";
    case ErrorCode::NoContraction: return "NO_CONTRACTION";
    case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::BadStoppingTime: return "BAD_STOPPING_TIME";
    case ErrorCode::InvalidAlpha: return "INVALID_ALPHA";
    case ErrorCode::BudgetExceeded: return "BUDGET_EXCEEDED";
    case ErrorCode::NotASupermartingale: return "NOT_A_SUPERMARTINGALE";
    case ErrorCode::Measurability: return "MEASURABILITY";
    case ErrorCode::UnknownDriver: return "UNKNOWN_DRIVER";
    case ErrorCode::ParseError: return "PARSE_ERROR";
  }
  return "UNKNOWN";
}

/// Library error carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace presto

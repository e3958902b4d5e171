#pragma once

#include <stdexcept>
#include <string>

namespace latticesir {

enum class ErrorCode {
  NonUnitMass,
  NegativeWeight,
  ZeroOffset,
  DuplicateOffset,
  UnsupportedDimension,
  DegenerateTruncation,
  DimensionMismatch,
  EmptyGrid,
  NegativeTime,
  ZeroMobility,
  InsufficientPoints,
  TorusSaturated,
  ZeroRecovery,
  ZeroSeparation,
  QuadratureStall,
  SystemTooLarge,
  IntegratorFailure,
  VanishingMean,
  NonIntegerDensity,
  Extinct,
  EventBudgetExceeded,
  ParseError,
  ValidationError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace latticesir

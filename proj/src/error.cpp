#include "latticesir/error.hpp"

namespace latticesir {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonUnitMass: return "NonUnitMass";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::ZeroOffset: return "ZeroOffset";
    case ErrorCode::DuplicateOffset: return "DuplicateOffset";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::DegenerateTruncation: return "DegenerateTruncation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::ZeroMobility: return "ZeroMobility";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::TorusSaturated: return "TorusSaturated";
    case ErrorCode::ZeroRecovery: return "ZeroRecovery";
    case ErrorCode::ZeroSeparation: return "ZeroSeparation";
    case ErrorCode::QuadratureStall: return "QuadratureStall";
    case ErrorCode::SystemTooLarge: return "SystemTooLarge";
    case ErrorCode::IntegratorFailure: return "IntegratorFailure";
    case ErrorCode::VanishingMean: return "VanishingMean";
    case ErrorCode::NonIntegerDensity: return "NonIntegerDensity";
    case ErrorCode::Extinct: return "Extinct";
    case ErrorCode::EventBudgetExceeded: return "EventBudgetExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "UnknownError";
}

}  // namespace latticesir

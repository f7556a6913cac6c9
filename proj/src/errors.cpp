#include "sldisp/errors.hpp"

namespace sldisp {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::SpotCountMismatch: return "SpotCountMismatch";
    case ErrorCode::AmbiguousQuadrant: return "AmbiguousQuadrant";
    case ErrorCode::DegenerateQuad: return "DegenerateQuad";
    case ErrorCode::DidNotConverge: return "DidNotConverge";
    case ErrorCode::NonPositivePixelDistance: return "NonPositivePixelDistance";
    case ErrorCode::PitchOutOfRange: return "PitchOutOfRange";
    case ErrorCode::NoFeatures: return "NoFeatures";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AllFeaturesLost: return "AllFeaturesLost";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
      return 2;
    case ErrorCode::SpotCountMismatch:
    case ErrorCode::AmbiguousQuadrant:
    case ErrorCode::DegenerateQuad:
      return 3;
    case ErrorCode::DidNotConverge:
    case ErrorCode::NonPositiveDepth:
      return 4;
    case ErrorCode::NoFeatures:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::AllFeaturesLost:
      return 5;
    default:
      return 1;
  }
}

}  // namespace sldisp

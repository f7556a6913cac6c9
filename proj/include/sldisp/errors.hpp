#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sldisp {

enum class ErrorCode {
  InvalidArgument,
  PreconditionFailed,
  IoError,
  ParseError,
  ValidationError,
  NonPositiveDepth,
  DegenerateGeometry,
  SpotCountMismatch,
  AmbiguousQuadrant,
  DegenerateQuad,
  DidNotConverge,
  NonPositivePixelDistance,
  PitchOutOfRange,
  NoFeatures,
  DimensionMismatch,
  AllFeaturesLost,
};

std::string_view error_name(ErrorCode code) noexcept;

// Process exit status used by the command line tool for each error family.
int exit_code(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace sldisp

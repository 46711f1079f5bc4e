#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fabric {

enum class ErrorCode {
  InvalidInput,
  InvalidParams,
  InvalidState,
  InvalidScale,
  InvalidReference,
  InvalidDiameter,
  InvalidSpacing,
  InvalidFraction,
  InvalidSpec,
  InvalidRegion,
  ImageTooSmall,
  Io,
  // Measurement outcomes: the input was well formed but nothing measurable was found.
  DegenerateHistogram,
  NoYarn,
  InsufficientYarns,
  MeasurementFailed,
  DecompositionFailed,
  IndeterminatePattern,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::InvalidParams: return "invalid-params";
    case ErrorCode::InvalidState: return "invalid-state";
    case ErrorCode::InvalidScale: return "invalid-scale";
    case ErrorCode::InvalidReference: return "invalid-reference";
    case ErrorCode::InvalidDiameter: return "invalid-diameter";
    case ErrorCode::InvalidSpacing: return "invalid-spacing";
    case ErrorCode::InvalidFraction: return "invalid-fraction";
    case ErrorCode::InvalidSpec: return "invalid-spec";
    case ErrorCode::InvalidRegion: return "invalid-region";
    case ErrorCode::ImageTooSmall: return "image-too-small";
    case ErrorCode::Io: return "io";
    case ErrorCode::DegenerateHistogram: return "degenerate-histogram";
    case ErrorCode::NoYarn: return "no-yarn";
    case ErrorCode::InsufficientYarns: return "insufficient-yarns";
    case ErrorCode::MeasurementFailed: return "measurement-failed";
    case ErrorCode::DecompositionFailed: return "decomposition-failed";
    case ErrorCode::IndeterminatePattern: return "indeterminate-pattern";
  }
  return "unknown";
}

/// True for errors that mean "the pipeline ran but the fabric is unmeasurable",
/// as opposed to a malformed request.
constexpr bool is_measurement_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateHistogram:
    case ErrorCode::NoYarn:
    case ErrorCode::InsufficientYarns:
    case ErrorCode::MeasurementFailed:
    case ErrorCode::DecompositionFailed:
    case ErrorCode::IndeterminatePattern:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fabric

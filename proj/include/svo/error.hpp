#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace svo {

enum class ErrorCode {
  NonPositiveDepth,
  NonPositiveDisparity,
  EpipolarViolation,
  ImageTooSmall,
  MissingDepth,
  SupportOutOfBounds,
  LengthMismatch,
  InsufficientMatches,
  DegenerateGeometry,
  NoConsensus,
  TooFewFrames,
  MissingGroundTruth,
  SequenceTooShort,
  MissingCalibration,
  MalformedPoseFile,
  ImageDecodeError,
  IndexOutOfRange,
  InvalidArgument,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can map them onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace svo

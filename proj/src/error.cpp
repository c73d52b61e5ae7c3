#include "svo/error.hpp"

namespace svo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::NonPositiveDisparity: return "NonPositiveDisparity";
    case ErrorCode::EpipolarViolation: return "EpipolarViolation";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::MissingDepth: return "MissingDepth";
    case ErrorCode::SupportOutOfBounds: return "SupportOutOfBounds";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InsufficientMatches: return "InsufficientMatches";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::NoConsensus: return "NoConsensus";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::MissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::SequenceTooShort: return "SequenceTooShort";
    case ErrorCode::MissingCalibration: return "MissingCalibration";
    case ErrorCode::MalformedPoseFile: return "MalformedPoseFile";
    case ErrorCode::ImageDecodeError: return "ImageDecodeError";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace svo

#include "autolabel/error.hpp"

namespace autolabel {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::MagicMismatch: return "MagicMismatch";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::DanglingIndex: return "DanglingIndex";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvalidPercent: return "InvalidPercent";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::GroundTruthUnavailable: return "GroundTruthUnavailable";
    case ErrorKind::MissingGroundTruth: return "MissingGroundTruth";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::DegenerateVector: return "DegenerateVector";
    case ErrorKind::RejectionExceeded: return "RejectionExceeded";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::EmptyDocument: return "EmptyDocument";
    case ErrorKind::EmptyProfile: return "EmptyProfile";
    case ErrorKind::EmptyEvaluation: return "EmptyEvaluation";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::StageFailed: return "StageFailed";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MissingFile:
    case ErrorKind::MagicMismatch:
    case ErrorKind::VersionMismatch:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::NonFiniteValue:
    case ErrorKind::DanglingIndex:
    case ErrorKind::DuplicateId:
    case ErrorKind::ValidationError:
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidPercent:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::GroundTruthUnavailable:
    case ErrorKind::MissingGroundTruth:
      return true;
    default:
      return false;
  }
}

}  // namespace autolabel

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace autolabel {

enum class ErrorKind {
  // input / validation failures (CLI exit code 1)
  MissingFile,
  MagicMismatch,
  VersionMismatch,
  ShapeMismatch,
  NonFiniteValue,
  DanglingIndex,
  DuplicateId,
  ValidationError,
  InvalidConfig,
  InvalidPercent,
  DimensionMismatch,
  GroundTruthUnavailable,
  MissingGroundTruth,
  // runtime failures (CLI exit code 2)
  IoError,
  DegenerateVector,
  RejectionExceeded,
  TooFewPoints,
  EmptyDocument,
  EmptyProfile,
  EmptyEvaluation,
  NonFiniteLoss,
  StageFailed,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for the kinds that describe bad input rather than a failed computation.
bool is_validation_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace autolabel

#pragma once

#include <stdexcept>
#include <string>

namespace anthro {

enum class ErrorKind {
  DegeneratePelvis,
  NonFinite,
  DimensionMismatch,
  EmptyCrossSection,
  OpenCrossSection,
  EmptyStream,
  InsufficientData,
  NonFiniteLoss,
  SelectionMismatch,
  LengthMismatch,
  IdMismatch,
  TooFewFrames,
  InvalidArgument,
  Parse,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

// Validation errors are caused by bad inputs (exit code 2 in the CLI); the
// rest are failures of a computation on otherwise well-formed data (exit 3).
bool is_validation_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace anthro

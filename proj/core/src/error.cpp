#include "anthro/error.hpp"

namespace anthro {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegeneratePelvis: return "DegeneratePelvis";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyCrossSection: return "EmptyCrossSection";
    case ErrorKind::OpenCrossSection: return "OpenCrossSection";
    case ErrorKind::EmptyStream: return "EmptyStream";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::SelectionMismatch: return "SelectionMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::IdMismatch: return "IdMismatch";
    case ErrorKind::TooFewFrames: return "TooFewFrames";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegeneratePelvis:
    case ErrorKind::NonFinite:
    case ErrorKind::EmptyCrossSection:
    case ErrorKind::OpenCrossSection:
    case ErrorKind::NonFiniteLoss:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace anthro

#include "phasemetro/errors.hpp"

namespace phasemetro {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotDensityMatrix: return "NotDensityMatrix";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::EtaOutOfRange: return "EtaOutOfRange";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::NMaxTooLarge: return "NMaxTooLarge";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::AlphaOutOfConvergenceDomain: return "AlphaOutOfConvergenceDomain";
    case ErrorCode::EtaEndpoint: return "EtaEndpoint";
    case ErrorCode::StepOutOfRange: return "StepOutOfRange";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::SingularInformation: return "SingularInformation";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::RangeError: return "RangeError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace phasemetro

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phasemetro {

enum class ErrorCode {
  NonSquare,
  NonHermitian,
  NonFinite,
  NegativeEigenvalue,
  DimensionMismatch,
  NotDensityMatrix,
  NotNormalized,
  EtaOutOfRange,
  IndexOutOfRange,
  NotOrthonormal,
  NMaxTooLarge,
  SupportViolation,
  AlphaOutOfConvergenceDomain,
  EtaEndpoint,
  StepOutOfRange,
  NotOrthogonal,
  SingularInformation,
  SchemaError,
  RangeError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; code() identifies the
// contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace phasemetro

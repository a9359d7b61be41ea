#pragma once

#include <stdexcept>
#include <string>

namespace usdkit {

enum class ErrorCode {
  ParseError,
  NonFinite,
  NoConvergence,
  NotHermitian,
  Singular,
  NegativeEigenvalue,
  DimensionMismatch,
  NonInvertible,
  LinearlyDependent,
  NotUnitary,
  NotDiscriminated,
  ZeroState,
  RankDeficient,
  NotNormalized,
  MissingPriors,
  LengthMismatch,
  BlockSizeMismatch,
  NotPassive,
  NotDensityMatrix,
};

const char* to_string(ErrorCode code);

/// All failures surface as this exception; code() carries the machine-readable
/// cause (the CLI maps codes onto exit statuses).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace usdkit

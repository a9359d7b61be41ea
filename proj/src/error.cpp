#include "usdkit/error.hpp"

namespace usdkit {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonInvertible: return "NonInvertible";
    case ErrorCode::LinearlyDependent: return "LinearlyDependent";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotDiscriminated: return "NotDiscriminated";
    case ErrorCode::ZeroState: return "ZeroState";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::MissingPriors: return "MissingPriors";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BlockSizeMismatch: return "BlockSizeMismatch";
    case ErrorCode::NotPassive: return "NotPassive";
    case ErrorCode::NotDensityMatrix: return "NotDensityMatrix";
  }
  return "Unknown";
}

}  // namespace usdkit

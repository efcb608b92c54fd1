#include "qcnnlab/error.hpp"

namespace qcnnlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TargetOutOfRange: return "TargetOutOfRange";
    case ErrorCode::DuplicateTarget: return "DuplicateTarget";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::AxisNotNormalized: return "AxisNotNormalized";
    case ErrorCode::TooManyQubits: return "TooManyQubits";
    case ErrorCode::AllZeroImage: return "AllZeroImage";
    case ErrorCode::RegisterTooSmall: return "RegisterTooSmall";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::TooDeep: return "TooDeep";
    case ErrorCode::WeightLengthMismatch: return "WeightLengthMismatch";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonBinaryLabels: return "NonBinaryLabels";
    case ErrorCode::NumericFailure: return "NumericFailure";
    case ErrorCode::AngleOutOfBounds: return "AngleOutOfBounds";
    case ErrorCode::FactorOutOfBounds: return "FactorOutOfBounds";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::UnsupportedPgm: return "UnsupportedPgm";
    case ErrorCode::UnknownClassPrefix: return "UnknownClassPrefix";
    case ErrorCode::NonIntegerFactor: return "NonIntegerFactor";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound:
    case ErrorCode::Malformed:
    case ErrorCode::BadMagic:
    case ErrorCode::CountMismatch:
    case ErrorCode::TruncatedFile:
    case ErrorCode::UnsupportedPgm:
    case ErrorCode::UnknownClassPrefix:
    case ErrorCode::NonIntegerFactor:
    case ErrorCode::InsufficientSamples:
    case ErrorCode::AllZeroImage:
    case ErrorCode::NonBinaryLabels:
      return ErrorCategory::Data;
    case ErrorCode::InvalidConfig:
      return ErrorCategory::Usage;
    default:
      return ErrorCategory::Numeric;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace qcnnlab

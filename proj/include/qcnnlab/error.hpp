#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcnnlab {

enum class ErrorCode {
  // simulator
  TargetOutOfRange,
  DuplicateTarget,
  DimensionMismatch,
  NotUnitary,
  AxisNotNormalized,
  TooManyQubits,
  // embedding
  AllZeroImage,
  RegisterTooSmall,
  OutOfRange,
  NonFiniteValue,
  // qcnn / training / cnn
  TooDeep,
  WeightLengthMismatch,
  EmptyBatch,
  LengthMismatch,
  ShapeMismatch,
  NonBinaryLabels,
  NumericFailure,
  // augment
  AngleOutOfBounds,
  FactorOutOfBounds,
  // datasets
  FileNotFound,
  Malformed,
  BadMagic,
  CountMismatch,
  TruncatedFile,
  UnsupportedPgm,
  UnknownClassPrefix,
  NonIntegerFactor,
  InsufficientSamples,
  // harness
  InvalidConfig,
};

enum class ErrorCategory { Usage, Data, Numeric };

std::string_view to_string(ErrorCode code);
ErrorCategory category(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace qcnnlab

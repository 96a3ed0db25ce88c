#pragma once

#include <stdexcept>
#include <string>

namespace coda {

enum class ErrorCode {
  // ingestion / panel
  ParseError,
  DuplicateCell,
  MissingCell,
  NegativeDeaths,
  YearWithZeroTotal,
  // simplex algebra
  AllZeroVector,
  NegativeEntry,
  LengthMismatch,
  NonPositivePerturbation,
  ZeroInColumn,
  // transforms
  AllPartsDropped,
  PartCountTooSmall,
  NonPositiveComponent,
  AlphaOutOfRange,
  AllZeroRow,
  AllComponentsClamped,
  // lee-carter
  TooFewYears,
  DegenerateBlock,
  NonPositiveRate,
  // tuning / intervals
  InsufficientYears,
  ShapeMismatch,
  EmptySamples,
  // config
  InvalidConfig,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. `stage` is set by the pipeline so a failure
/// names the step it occurred in (the same panel can succeed under one
/// transform and fail under another).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const { return code_; }
  const std::string& stage() const { return stage_; }
  void set_stage(std::string stage) { stage_ = std::move(stage); }

 private:
  ErrorCode code_;
  std::string stage_;
};

}  // namespace coda

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace panelspec {

enum class ErrorKind {
  // ingestion and dataset validation
  Io,
  InvalidSchema,
  MissingColumn,
  MissingCell,
  DuplicateCell,
  NonNumericValue,
  TooFewUnitsOrPeriods,
  InterceptColumn,
  // transforms
  ThetaOutOfRange,
  ZeroIdiosyncraticVariance,
  // estimation
  RankDeficientDesign,
  InsufficientDegreesOfFreedom,
  // weighted likelihood
  EmptySample,
  NonpositiveBandwidth,
  NonpositiveScale,
  DeltaOutOfRange,
  DegenerateWeights,
  InvalidConfig,
  // inference
  DimensionMismatch,
  MethodMismatch,
  NegativeArgument,
  ZeroTotalVariation,
  // simulation
  TooManyOutliers,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every recoverable failure in the library is reported as a PanelError carrying
// a machine-checkable kind plus a message naming the offending cell/column/value.
class PanelError : public std::runtime_error {
 public:
  PanelError(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace panelspec

#include "panelspec/errors.hpp"

namespace panelspec {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io: return "Io";
    case ErrorKind::InvalidSchema: return "InvalidSchema";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::MissingCell: return "MissingCell";
    case ErrorKind::DuplicateCell: return "DuplicateCell";
    case ErrorKind::NonNumericValue: return "NonNumericValue";
    case ErrorKind::TooFewUnitsOrPeriods: return "TooFewUnitsOrPeriods";
    case ErrorKind::InterceptColumn: return "InterceptColumn";
    case ErrorKind::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorKind::ZeroIdiosyncraticVariance: return "ZeroIdiosyncraticVariance";
    case ErrorKind::RankDeficientDesign: return "RankDeficientDesign";
    case ErrorKind::InsufficientDegreesOfFreedom: return "InsufficientDegreesOfFreedom";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::NonpositiveBandwidth: return "NonpositiveBandwidth";
    case ErrorKind::NonpositiveScale: return "NonpositiveScale";
    case ErrorKind::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorKind::DegenerateWeights: return "DegenerateWeights";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MethodMismatch: return "MethodMismatch";
    case ErrorKind::NegativeArgument: return "NegativeArgument";
    case ErrorKind::ZeroTotalVariation: return "ZeroTotalVariation";
    case ErrorKind::TooManyOutliers: return "TooManyOutliers";
  }
  return "Unknown";
}

PanelError::PanelError(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace panelspec

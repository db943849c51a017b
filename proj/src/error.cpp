#include "collab/error.hpp"

namespace collab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::CorrelationOutOfRange: return "CorrelationOutOfRange";
    case ErrorCode::InvalidPolicy: return "InvalidPolicy";
    case ErrorCode::DegeneratePolicy: return "DegeneratePolicy";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::InfeasibleScenario: return "InfeasibleScenario";
    case ErrorCode::SingularEverywhere: return "SingularEverywhere";
    case ErrorCode::MissingStratum: return "MissingStratum";
    case ErrorCode::InfeasiblePolicy: return "InfeasiblePolicy";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace collab

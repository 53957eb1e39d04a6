#include "mfe/errors.hpp"

namespace mfe {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::OutOfChart: return "OutOfChart";
    case ErrorCode::ChartExit: return "ChartExit";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::CutLocus: return "CutLocus";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegeneratePlane: return "DegeneratePlane";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ProposalUnbounded: return "ProposalUnbounded";
    case ErrorCode::QuadratureFail: return "QuadratureFail";
    case ErrorCode::SingularInformation: return "SingularInformation";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NonConvexRegion: return "NonConvexRegion";
    case ErrorCode::SingularMean: return "SingularMean";
    case ErrorCode::PositivityViolation: return "PositivityViolation";
    case ErrorCode::NotTangent: return "NotTangent";
    case ErrorCode::SingularEfficientInformation: return "SingularEfficientInformation";
    case ErrorCode::PriorNotSmooth: return "PriorNotSmooth";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace mfe

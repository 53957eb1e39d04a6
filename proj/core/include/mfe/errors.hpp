#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfe {

enum class ErrorCode {
  SingularMetric,
  OutOfChart,
  ChartExit,
  ToleranceNotMet,
  CutLocus,
  NoConvergence,
  DegeneratePlane,
  NotPSD,
  DimensionMismatch,
  ProposalUnbounded,
  QuadratureFail,
  SingularInformation,
  NotConverged,
  NonConvexRegion,
  SingularMean,
  PositivityViolation,
  NotTangent,
  SingularEfficientInformation,
  PriorNotSmooth,
  InvalidArgument,
  Config,
};

std::string_view to_string(ErrorCode code);

/// All library failures are reported through this exception type; `code()`
/// identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace mfe

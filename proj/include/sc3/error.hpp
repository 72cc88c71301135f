#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sc3 {

enum class ErrorCode {
  InvalidParams,
  ZeroResourceForPositiveData,
  NoFeasibleFlow,
  SingularStateMatrix,
  UnsupportedStructure,
  NoConvergence,
  CostBelowFloor,
  Unstabilizable,
  InfeasibleSubproblem,
  Infeasible,
  BadOverride,
  BadConfig,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::ZeroResourceForPositiveData: return "ZeroResourceForPositiveData";
    case ErrorCode::NoFeasibleFlow: return "NoFeasibleFlow";
    case ErrorCode::SingularStateMatrix: return "SingularStateMatrix";
    case ErrorCode::UnsupportedStructure: return "UnsupportedStructure";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::CostBelowFloor: return "CostBelowFloor";
    case ErrorCode::Unstabilizable: return "Unstabilizable";
    case ErrorCode::InfeasibleSubproblem: return "InfeasibleSubproblem";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::BadOverride: return "BadOverride";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

// All library failures are reported through this one exception type; callers
// branch on code() rather than on a class hierarchy.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sc3

#include "divctl/errors.hpp"

namespace divctl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::RootIsolationFailure: return "RootIsolationFailure";
    case ErrorCode::NumericalCancellation: return "NumericalCancellation";
    case ErrorCode::ParameterPole: return "ParameterPole";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::BranchDomain: return "BranchDomain";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::FlatProfile: return "FlatProfile";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace divctl

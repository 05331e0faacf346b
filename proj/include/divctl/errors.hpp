#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace divctl {

enum class ErrorCode {
  InvalidParameter,
  ConfigError,
  NoBracket,
  MaxIterExceeded,
  TargetUnreachable,
  RegimeMismatch,
  RootIsolationFailure,
  NumericalCancellation,
  ParameterPole,
  NonConvergence,
  BranchDomain,
  QuadratureFailure,
  FlatProfile,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code names the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace divctl

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace confvisc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ErrorCode {
  NonConvergence,
  BadK,
  BadDimension,
  OutOfDomain,
  TooCloseToBoundary,
  NonPositiveU,
  EmptyRegion,
  HitsPole,
  DomainMismatch,
  DimensionTooHigh,
  UnboundedHessian,
  OrderViolation,
  BadParams,
  BracketFailure,
  NoStartingRadius,
  NotASolution,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it without string matching.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace confvisc

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fleetsample {

enum class ErrorCode {
  InvalidDistribution,
  InvalidConfusion,
  ZeroPredictedMass,
  RankDeficient,
  SingularChannel,
  NegativeContribution,
  DimensionMismatch,
  NegativeBudget,
  InvalidArgument,
  ZeroClasses,
  EmptyFleet,
  NotConverged,
  WrongPayloadCount,
  BrokenRing,
  ProtocolError,
  MissingField,
  BadDimension,
  UnknownPolicy,
  RowNotStochastic,
  ConfigError,
  IoFailure,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. `code()` identifies the failure class so callers
/// (the CLI in particular) can map errors to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace fleetsample

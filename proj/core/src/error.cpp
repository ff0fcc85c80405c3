#include "fleetsample/error.hpp"

namespace fleetsample {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::InvalidConfusion: return "InvalidConfusion";
    case ErrorCode::ZeroPredictedMass: return "ZeroPredictedMass";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularChannel: return "SingularChannel";
    case ErrorCode::NegativeContribution: return "NegativeContribution";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeBudget: return "NegativeBudget";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroClasses: return "ZeroClasses";
    case ErrorCode::EmptyFleet: return "EmptyFleet";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::WrongPayloadCount: return "WrongPayloadCount";
    case ErrorCode::BrokenRing: return "BrokenRing";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::UnknownPolicy: return "UnknownPolicy";
    case ErrorCode::RowNotStochastic: return "RowNotStochastic";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace fleetsample

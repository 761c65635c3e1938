#include "gpinv/error.hpp"

namespace gpinv {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IterationFailure: return "IterationFailure";
    case ErrorCode::RankAmbiguity: return "RankAmbiguity";
    case ErrorCode::NonRealRequired: return "NonRealRequired";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::UnsupportedModel: return "UnsupportedModel";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::ReferenceUnavailable: return "ReferenceUnavailable";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace gpinv

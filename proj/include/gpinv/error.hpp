#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gpinv {

enum class ErrorCode {
  IterationFailure,
  RankAmbiguity,
  NonRealRequired,
  DomainViolation,
  UnsupportedModel,
  TruncationTooSmall,
  ReferenceUnavailable,
  ConfigInvalid,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure the library reports is an Error carrying one of the codes
// above; callers that keep going after a failure (per-n schedule work,
// report writers) switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gpinv

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wpcis {

enum class ErrorCode {
  MalformedUrl,
  NoVersionFound,
  AllProbesFailed,
  NotJsonArray,
  NetworkUnreachable,
  InvalidSuffix,
  ConsentRequired,
  InvalidArgument,
  BindFailure,
  UnknownSite,
  EmptyInput,
  MissingLabels,
  ConfigParseError,
  FileNotFound,
  LabelJoinError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure the library reports is an Error carrying one of the codes
// above; callers branch on code() rather than on the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wpcis

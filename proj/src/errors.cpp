#include "wpcis/errors.hpp"

namespace wpcis {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedUrl: return "MalformedUrl";
    case ErrorCode::NoVersionFound: return "NoVersionFound";
    case ErrorCode::AllProbesFailed: return "AllProbesFailed";
    case ErrorCode::NotJsonArray: return "NotJsonArray";
    case ErrorCode::NetworkUnreachable: return "NetworkUnreachable";
    case ErrorCode::InvalidSuffix: return "InvalidSuffix";
    case ErrorCode::ConsentRequired: return "ConsentRequired";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BindFailure: return "BindFailure";
    case ErrorCode::UnknownSite: return "UnknownSite";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingLabels: return "MissingLabels";
    case ErrorCode::ConfigParseError: return "ConfigParseError";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::LabelJoinError: return "LabelJoinError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace wpcis

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace wpcis {

enum class CoercionMode { off, passive, active };
enum class OutputFormat { json, csv, text };

std::string_view to_string(CoercionMode mode) noexcept;
std::optional<CoercionMode> parse_coercion_mode(std::string_view text) noexcept;
std::string_view to_string(OutputFormat format) noexcept;
std::optional<OutputFormat> parse_output_format(std::string_view text) noexcept;

/// Literal value --consent must carry before any mutating request is sent.
inline constexpr std::string_view kConsentToken = "I-OWN-THIS-TARGET";

inline constexpr std::int64_t kDefaultTimeoutMs = 10000;

struct ScanOptions {
  std::int64_t timeout_ms = kDefaultTimeoutMs;
  int concurrency = 8;
  CoercionMode coercion_mode = CoercionMode::passive;
  std::optional<std::string> consent_token;
  OutputFormat output_format = OutputFormat::text;
  std::optional<std::string> output_path;
};

inline bool has_valid_consent(const std::optional<std::string>& token) noexcept {
  return token.has_value() && *token == kConsentToken;
}

}  // namespace wpcis

#include "wpcis/scan_options.hpp"

namespace wpcis {

std::string_view to_string(CoercionMode mode) noexcept {
  switch (mode) {
    case CoercionMode::off: return "off";
    case CoercionMode::passive: return "passive";
    case CoercionMode::active: return "active";
  }
  return "off";
}

std::optional<CoercionMode> parse_coercion_mode(std::string_view text) noexcept {
  if (text == "off") return CoercionMode::off;
  if (text == "passive") return CoercionMode::passive;
  if (text == "active") return CoercionMode::active;
  return std::nullopt;
}

std::string_view to_string(OutputFormat format) noexcept {
  switch (format) {
    case OutputFormat::json: return "json";
    case OutputFormat::csv: return "csv";
    case OutputFormat::text: return "text";
  }
  return "text";
}

std::optional<OutputFormat> parse_output_format(std::string_view text) noexcept {
  if (text == "json") return OutputFormat::json;
  if (text == "csv") return OutputFormat::csv;
  if (text == "text") return OutputFormat::text;
  return std::nullopt;
}

}  // namespace wpcis

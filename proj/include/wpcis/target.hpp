#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace wpcis {

enum class Scheme { http, https };

std::string_view to_string(Scheme scheme) noexcept;
std::uint16_t default_port(Scheme scheme) noexcept;

/// Normalized base URL of a site under test.
///
/// `host` is lowercase, `base_path` is either empty or starts with "/" and
/// never ends with "/".
struct TargetUrl {
  Scheme scheme = Scheme::http;
  std::string host;
  std::uint16_t port = 80;
  std::string base_path;

  /// The base URL, e.g. "http://localhost/wp". The port is omitted when it
  /// is the scheme default.
  std::string str() const;

  friend bool operator==(const TargetUrl&, const TargetUrl&) = default;
};

/// Parses and normalizes user-supplied target text. A missing scheme
/// defaults to http. Throws Error(MalformedUrl).
TargetUrl normalize_target(std::string_view raw);

}  // namespace wpcis

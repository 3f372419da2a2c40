#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wpcis/http_client.hpp"
#include "wpcis/target.hpp"

namespace wpcis {

enum class EndpointVariant { plain_path, index_php_path, rest_route_query };

inline constexpr std::array<EndpointVariant, 3> kEndpointVariants = {
    EndpointVariant::plain_path, EndpointVariant::index_php_path,
    EndpointVariant::rest_route_query};

std::string_view to_string(EndpointVariant variant) noexcept;

/// One entry of the posts collection, fields copied verbatim.
struct PostRecord {
  std::int64_t id = 0;
  std::string date;
  std::string date_gmt;
  std::string guid_rendered;
  std::string modified;
  std::string slug;

  friend bool operator==(const PostRecord&, const PostRecord&) = default;
};

struct ParsedPosts {
  std::vector<PostRecord> posts;
  std::size_t skipped = 0;  // elements without a usable "id"
};

struct ProbeResult {
  std::string endpoint_url;
  int http_status = 0;
  std::vector<PostRecord> posts;
  std::optional<std::string> parse_error;
  EndpointVariant variant = EndpointVariant::plain_path;

  /// The route answered 200 with a JSON array.
  bool endpoint_present() const noexcept {
    return http_status == 200 && !parse_error.has_value();
  }
};

std::string build_endpoint_url(const TargetUrl& target, EndpointVariant variant);

/// Throws Error(NotJsonArray) unless the body is a top-level JSON array.
ParsedPosts parse_posts(std::string_view body);

/// Tries plain_path, index_php_path, rest_route_query in order and returns
/// the first variant that answers 200 with a JSON array, otherwise the last
/// HTTP-level attempt. Throws TransportError (NetworkUnreachable) when every
/// variant failed at the transport layer.
ProbeResult probe_posts_endpoint(const TargetUrl& target, HttpClient& http);

}  // namespace wpcis

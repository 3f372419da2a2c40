#include "wpcis/probe.hpp"

#include <json.hpp>

namespace wpcis {
namespace {

using nlohmann::json;

std::string string_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

}  // namespace

std::string_view to_string(EndpointVariant variant) noexcept {
  switch (variant) {
    case EndpointVariant::plain_path: return "plain_path";
    case EndpointVariant::index_php_path: return "index_php_path";
    case EndpointVariant::rest_route_query: return "rest_route_query";
  }
  return "plain_path";
}

std::string build_endpoint_url(const TargetUrl& target, EndpointVariant variant) {
  // base_path never ends with "/", so each suffix adds exactly one.
  const std::string base = target.str();
  switch (variant) {
    case EndpointVariant::plain_path: return base + "/wp-json/wp/v2/posts/";
    case EndpointVariant::index_php_path: return base + "/index.php/wp-json/wp/v2/posts/";
    case EndpointVariant::rest_route_query: return base + "/?rest_route=/wp/v2/posts";
  }
  return base;
}

ParsedPosts parse_posts(std::string_view body) {
  const json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    std::string what = doc.is_discarded() ? "body is not JSON" : "body is JSON but not an array";
    if (doc.is_object() && doc.contains("code") && doc["code"].is_string()) {
      what += " (code " + doc["code"].get<std::string>() + ")";
    }
    throw Error(ErrorCode::NotJsonArray, what);
  }

  ParsedPosts out;
  for (const auto& element : doc) {
    if (!element.is_object()) {
      ++out.skipped;
      continue;
    }
    const auto id = element.find("id");
    if (id == element.end() || !id->is_number_integer() || id->get<std::int64_t>() < 0) {
      ++out.skipped;
      continue;
    }
    PostRecord post;
    post.id = id->get<std::int64_t>();
    post.date = string_field(element, "date");
    post.date_gmt = string_field(element, "date_gmt");
    post.modified = string_field(element, "modified");
    post.slug = string_field(element, "slug");
    if (const auto guid = element.find("guid"); guid != element.end()) {
      if (guid->is_object()) {
        post.guid_rendered = string_field(*guid, "rendered");
      } else if (guid->is_string()) {
        post.guid_rendered = guid->get<std::string>();
      }
    }
    out.posts.push_back(std::move(post));
  }
  return out;
}

ProbeResult probe_posts_endpoint(const TargetUrl& target, HttpClient& http) {
  const Headers headers = {{"Accept", "application/json"}};
  std::optional<ProbeResult> last;
  std::optional<TransportError> last_transport;

  for (const EndpointVariant variant : kEndpointVariants) {
    ProbeResult attempt;
    attempt.variant = variant;
    attempt.endpoint_url = build_endpoint_url(target, variant);
    HttpResponse response;
    try {
      response = http.get(attempt.endpoint_url, headers);
    } catch (const TransportError& e) {
      last_transport = e;
      continue;
    }
    attempt.http_status = response.status;
    try {
      auto parsed = parse_posts(response.body);
      if (response.status == 200) {
        attempt.posts = std::move(parsed.posts);
        return attempt;
      }
      attempt.parse_error = "HTTP " + std::to_string(response.status);
    } catch (const Error& e) {
      attempt.parse_error = e.what();
    }
    last = std::move(attempt);
  }

  if (last) return *last;
  throw *last_transport;
}

}  // namespace wpcis

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wpcis/sector.hpp"
#include "wpcis/version.hpp"

namespace wpcis::mock {

enum class SiteBehavior { vulnerable, patched, routes_disabled, not_wordpress };
enum class PermalinkVariant { plain_path, index_php_path, rest_route_query, all };

std::string_view to_string(SiteBehavior behavior) noexcept;
std::string_view to_string(PermalinkVariant variant) noexcept;

struct SeedPost {
  std::int64_t id = 0;
  std::string title;
  std::string content;
  std::string slug;
  std::string date;
  std::string date_gmt;
  std::string modified;
  std::string modified_gmt;
};

struct MockSiteSpec {
  std::string site_id;
  std::string version_string;  // e.g. "WordPress 4.7.0"
  SiteBehavior behavior = SiteBehavior::vulnerable;
  PermalinkVariant permalink_variant = PermalinkVariant::all;
  std::vector<SeedPost> posts_seed;
  Sector sector = Sector::unknown;
  std::int64_t latency_ms = 0;
};

/// Throws Error(ConfigParseError) naming the violated constraint.
void validate(const MockSiteSpec& spec);

/// Parses a fleet file: a JSON array of MockSiteSpec objects. Syntax errors
/// report line and column. Throws Error(ConfigParseError).
std::vector<MockSiteSpec> parse_fleet_json(std::string_view text);
std::string fleet_to_json(const std::vector<MockSiteSpec>& fleet);

struct MockRequest {
  std::string method;  // "GET" / "POST"
  std::string path;    // site-relative, starts with "/"
  std::multimap<std::string, std::string> params;  // decoded query
  std::string body;
  std::string base_url;  // absolute site base, used for guid/link fields
};

struct MockResponse {
  int status = 200;
  std::string content_type = "text/html; charset=UTF-8";
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
};

struct StoredPost {
  std::string title;
  std::string content;
  std::string slug;
  std::string date;
  std::string date_gmt;
  std::string modified;
  std::string modified_gmt;
};

/// Posts of one site keyed by id. All access is serialized.
class PostStore {
 public:
  explicit PostStore(const std::vector<SeedPost>& seed);

  std::optional<StoredPost> find(std::int64_t id) const;
  bool contains(std::int64_t id) const;
  /// Applies title/content when present; returns the updated post or nullopt.
  std::optional<StoredPost> update(std::int64_t id, const std::optional<std::string>& title,
                                   const std::optional<std::string>& content);
  /// Posts in seed order.
  std::vector<std::pair<std::int64_t, StoredPost>> snapshot() const;
  /// SHA-256 hex over the id-sorted (id, title, content) triples.
  std::string hash() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::int64_t> order_;
  std::map<std::int64_t, StoredPost> posts_;
};

/// One emulated site. handle() is safe to call concurrently.
class MockSite {
 public:
  explicit MockSite(MockSiteSpec spec);

  const MockSiteSpec& spec() const noexcept { return spec_; }
  const PostStore& store() const noexcept { return store_; }
  std::string store_hash() const { return store_.hash(); }

  MockResponse handle(const MockRequest& request);

  MockResponse handle_get_posts(const MockRequest& request) const;
  MockResponse handle_get_post(const MockRequest& request, std::string_view path_id,
                               const std::optional<std::string>& query_id) const;
  MockResponse handle_update_post(const MockRequest& request, std::string_view path_id,
                                  const std::optional<std::string>& query_id,
                                  std::string_view body);

 private:
  MockResponse handle_rest(const MockRequest& request, std::string_view route);
  MockResponse homepage(const MockRequest& request) const;
  MockResponse feed(const MockRequest& request) const;
  MockResponse readme() const;
  MockResponse rest_index(const MockRequest& request) const;
  bool serves(PermalinkVariant variant) const noexcept;
  std::string version_text() const;

  MockSiteSpec spec_;
  std::optional<WpVersion> version_;
  PostStore store_;
};

MockResponse rest_error(int status, std::string_view code, std::string_view message);

}  // namespace wpcis::mock

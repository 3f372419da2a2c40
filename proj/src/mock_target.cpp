#include "wpcis/mock_target.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <set>

#include <json.hpp>

#include "wpcis/errors.hpp"
#include "wpcis/id_coercion.hpp"

namespace wpcis::mock {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::string_view kDefaultDate = "2017-01-26T10:00:00";
constexpr std::string_view kDefaultDateGmt = "2017-01-26T17:00:00";

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::ConfigParseError, message);
}

MockResponse json_response(int status, const ordered_json& body) {
  MockResponse r;
  r.status = status;
  r.content_type = "application/json; charset=UTF-8";
  r.body = body.dump();
  return r;
}

MockResponse html_not_found() {
  MockResponse r;
  r.status = 404;
  r.body = "<!DOCTYPE html><html><head><title>Page not found</title></head>"
           "<body><h1>Not Found</h1></body></html>";
  return r;
}

std::optional<std::string> first_param(const MockRequest& req, const std::string& key) {
  const auto it = req.params.find(key);
  if (it == req.params.end()) return std::nullopt;
  return it->second;
}

// Title/content in an update body may be plain strings or {"raw": ...}.
std::optional<std::string> text_field(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_object() && it->contains("raw") && (*it)["raw"].is_string()) {
    return (*it)["raw"].get<std::string>();
  }
  return std::nullopt;
}

ordered_json post_json(std::int64_t id, const StoredPost& post, const std::string& base_url) {
  const std::string permalink = base_url + "/?p=" + std::to_string(id);
  ordered_json j;
  j["id"] = id;
  j["date"] = post.date;
  j["date_gmt"] = post.date_gmt;
  j["guid"] = {{"rendered", permalink}};
  j["modified"] = post.modified;
  j["modified_gmt"] = post.modified_gmt;
  j["slug"] = post.slug;
  j["status"] = "publish";
  j["type"] = "post";
  j["link"] = permalink;
  j["title"] = {{"rendered", post.title}};
  j["content"] = {{"rendered", post.content}, {"protected", false}};
  return j;
}

template <typename Enum, std::size_t N>
Enum parse_enum(const json& value, const std::array<Enum, N>& options, const std::string& where) {
  if (!value.is_string()) config_error(where + ": expected a string");
  const auto text = value.get<std::string>();
  for (Enum e : options) {
    if (to_string(e) == text) return e;
  }
  config_error(where + ": unknown value '" + text + "'");
}

constexpr std::array<SiteBehavior, 4> kBehaviors = {SiteBehavior::vulnerable, SiteBehavior::patched,
                                                    SiteBehavior::routes_disabled,
                                                    SiteBehavior::not_wordpress};
constexpr std::array<PermalinkVariant, 4> kPermalinks = {
    PermalinkVariant::plain_path, PermalinkVariant::index_php_path,
    PermalinkVariant::rest_route_query, PermalinkVariant::all};

std::string string_or(const json& obj, const char* key, std::string_view fallback,
                      const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return std::string(fallback);
  if (!it->is_string()) config_error(where + "." + key + ": expected a string");
  return it->get<std::string>();
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

std::string_view to_string(SiteBehavior behavior) noexcept {
  switch (behavior) {
    case SiteBehavior::vulnerable: return "vulnerable";
    case SiteBehavior::patched: return "patched";
    case SiteBehavior::routes_disabled: return "routes_disabled";
    case SiteBehavior::not_wordpress: return "not_wordpress";
  }
  return "not_wordpress";
}

std::string_view to_string(PermalinkVariant variant) noexcept {
  switch (variant) {
    case PermalinkVariant::plain_path: return "plain_path";
    case PermalinkVariant::index_php_path: return "index_php_path";
    case PermalinkVariant::rest_route_query: return "rest_route_query";
    case PermalinkVariant::all: return "all";
  }
  return "all";
}

void validate(const MockSiteSpec& spec) {
  const std::string where = "site '" + spec.site_id + "'";
  if (spec.site_id.empty()) config_error("site_id must be non-empty");
  const bool id_ok = std::all_of(spec.site_id.begin(), spec.site_id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '-' || c == '_' || c == '.';
  });
  if (!id_ok) config_error(where + ": site_id may only contain [A-Za-z0-9._-]");
  if (spec.behavior == SiteBehavior::vulnerable) {
    const auto v = find_version(spec.version_string);
    if (!v || !is_affected_version(*v)) {
      config_error(where + ": vulnerable sites must report version 4.7.0 or 4.7.1, got '" +
                   spec.version_string + "'");
    }
  }
  if (spec.latency_ms < 0) config_error(where + ": latency_ms must be non-negative");
  std::set<std::int64_t> ids;
  for (const auto& post : spec.posts_seed) {
    if (post.id < 0) config_error(where + ": post ids must be non-negative");
    if (!ids.insert(post.id).second) {
      config_error(where + ": duplicate post id " + std::to_string(post.id));
    }
  }
}

std::vector<MockSiteSpec> parse_fleet_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    config_error("fleet JSON syntax error at line " + std::to_string(line) + ", column " +
                 std::to_string(column) + ": " + e.what());
  }
  if (!doc.is_array()) config_error("fleet JSON must be an array of site objects");

  static const std::set<std::string> kSiteKeys = {"site_id",  "version_string", "behavior",
                                                  "permalink_variant", "posts_seed", "sector",
                                                  "latency_ms"};
  static const std::set<std::string> kPostKeys = {"id",   "title",    "content",  "slug",
                                                  "date", "date_gmt", "modified", "modified_gmt"};

  std::vector<MockSiteSpec> fleet;
  std::set<std::string> site_ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& site = doc[i];
    const std::string where = "fleet[" + std::to_string(i) + "]";
    if (!site.is_object()) config_error(where + ": expected an object");
    for (const auto& [key, _] : site.items()) {
      if (!kSiteKeys.contains(key)) config_error(where + ": unknown field '" + key + "'");
    }
    if (!site.contains("site_id")) config_error(where + ": missing site_id");
    if (!site.contains("behavior")) config_error(where + ": missing behavior");

    MockSiteSpec spec;
    spec.site_id = string_or(site, "site_id", "", where);
    spec.version_string = string_or(site, "version_string", "", where);
    spec.behavior = parse_enum(site["behavior"], kBehaviors, where + ".behavior");
    if (site.contains("permalink_variant")) {
      spec.permalink_variant =
          parse_enum(site["permalink_variant"], kPermalinks, where + ".permalink_variant");
    }
    if (site.contains("sector")) {
      const auto sector_text = string_or(site, "sector", "unknown", where);
      const auto sector = parse_sector(sector_text);
      if (!sector) config_error(where + ".sector: unknown value '" + sector_text + "'");
      spec.sector = *sector;
    }
    if (site.contains("latency_ms")) {
      if (!site["latency_ms"].is_number_integer()) config_error(where + ".latency_ms: expected an integer");
      spec.latency_ms = site["latency_ms"].get<std::int64_t>();
    }
    if (site.contains("posts_seed")) {
      const json& posts = site["posts_seed"];
      if (!posts.is_array()) config_error(where + ".posts_seed: expected an array");
      for (std::size_t p = 0; p < posts.size(); ++p) {
        const json& post = posts[p];
        const std::string pwhere = where + ".posts_seed[" + std::to_string(p) + "]";
        if (!post.is_object()) config_error(pwhere + ": expected an object");
        for (const auto& [key, _] : post.items()) {
          if (!kPostKeys.contains(key)) config_error(pwhere + ": unknown field '" + key + "'");
        }
        if (!post.contains("id") || !post["id"].is_number_integer()) {
          config_error(pwhere + ".id: expected an integer");
        }
        SeedPost seed;
        seed.id = post["id"].get<std::int64_t>();
        seed.title = string_or(post, "title", "", pwhere);
        seed.content = string_or(post, "content", "", pwhere);
        seed.slug = string_or(post, "slug", "post-" + std::to_string(seed.id), pwhere);
        seed.date = string_or(post, "date", kDefaultDate, pwhere);
        seed.date_gmt = string_or(post, "date_gmt", kDefaultDateGmt, pwhere);
        seed.modified = string_or(post, "modified", seed.date, pwhere);
        seed.modified_gmt = string_or(post, "modified_gmt", seed.date_gmt, pwhere);
        spec.posts_seed.push_back(std::move(seed));
      }
    }
    validate(spec);
    if (!site_ids.insert(spec.site_id).second) {
      config_error(where + ": duplicate site_id '" + spec.site_id + "'");
    }
    fleet.push_back(std::move(spec));
  }
  if (fleet.empty()) config_error("fleet must contain at least one site");
  return fleet;
}

std::string fleet_to_json(const std::vector<MockSiteSpec>& fleet) {
  ordered_json doc = ordered_json::array();
  for (const auto& spec : fleet) {
    ordered_json site;
    site["site_id"] = spec.site_id;
    site["version_string"] = spec.version_string;
    site["behavior"] = std::string(to_string(spec.behavior));
    site["permalink_variant"] = std::string(to_string(spec.permalink_variant));
    ordered_json posts = ordered_json::array();
    for (const auto& p : spec.posts_seed) {
      posts.push_back({{"id", p.id},
                       {"title", p.title},
                       {"content", p.content},
                       {"slug", p.slug},
                       {"date", p.date},
                       {"date_gmt", p.date_gmt},
                       {"modified", p.modified},
                       {"modified_gmt", p.modified_gmt}});
    }
    site["posts_seed"] = std::move(posts);
    site["sector"] = std::string(to_string(spec.sector));
    site["latency_ms"] = spec.latency_ms;
    doc.push_back(std::move(site));
  }
  return doc.dump(2) + "\n";
}

MockResponse rest_error(int status, std::string_view code, std::string_view message) {
  ordered_json body;
  body["code"] = std::string(code);
  body["message"] = std::string(message);
  body["data"] = {{"status", status}};
  return json_response(status, body);
}

PostStore::PostStore(const std::vector<SeedPost>& seed) {
  for (const auto& s : seed) {
    order_.push_back(s.id);
    posts_[s.id] = StoredPost{s.title,    s.content,  s.slug,        s.date,
                              s.date_gmt, s.modified, s.modified_gmt};
  }
}

std::optional<StoredPost> PostStore::find(std::int64_t id) const {
  std::lock_guard lock(mu_);
  const auto it = posts_.find(id);
  if (it == posts_.end()) return std::nullopt;
  return it->second;
}

bool PostStore::contains(std::int64_t id) const {
  std::lock_guard lock(mu_);
  return posts_.contains(id);
}

std::optional<StoredPost> PostStore::update(std::int64_t id, const std::optional<std::string>& title,
                                            const std::optional<std::string>& content) {
  std::lock_guard lock(mu_);
  const auto it = posts_.find(id);
  if (it == posts_.end()) return std::nullopt;
  if (title) it->second.title = *title;
  if (content) it->second.content = *content;
  return it->second;
}

std::vector<std::pair<std::int64_t, StoredPost>> PostStore::snapshot() const {
  std::lock_guard lock(mu_);
  std::vector<std::pair<std::int64_t, StoredPost>> out;
  out.reserve(order_.size());
  for (const auto id : order_) out.emplace_back(id, posts_.at(id));
  return out;
}

std::string PostStore::hash() const {
  std::string material;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, post] : posts_) {
      material += std::to_string(id) + '\n';
      material += std::to_string(post.title.size()) + ':' + post.title;
      material += std::to_string(post.content.size()) + ':' + post.content + '\n';
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(material.data(), material.size(), digest, &length, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

MockSite::MockSite(MockSiteSpec spec)
    : spec_(std::move(spec)), version_(find_version(spec_.version_string)), store_(spec_.posts_seed) {
  validate(spec_);
}

bool MockSite::serves(PermalinkVariant variant) const noexcept {
  return spec_.permalink_variant == PermalinkVariant::all || spec_.permalink_variant == variant;
}

std::string MockSite::version_text() const { return version_ ? version_->str() : std::string(); }

MockResponse MockSite::handle(const MockRequest& request) {
  const std::string path = request.path.empty() ? "/" : request.path;
  const bool wordpress = spec_.behavior != SiteBehavior::not_wordpress;
  const bool routes_disabled = spec_.behavior == SiteBehavior::routes_disabled;

  if (!wordpress) {
    if (path == "/" || path == "/index.html") return homepage(request);
    return html_not_found();
  }

  const auto rest_route = first_param(request, "rest_route");
  if (rest_route && (path == "/" || path == "/index.php")) {
    if (routes_disabled) return rest_error(404, "rest_no_route", "No route was found matching the URL and request method");
    if (!serves(PermalinkVariant::rest_route_query)) return html_not_found();
    return handle_rest(request, *rest_route);
  }

  for (const auto& [prefix, variant] :
       {std::pair<std::string_view, PermalinkVariant>{"/wp-json", PermalinkVariant::plain_path},
        std::pair<std::string_view, PermalinkVariant>{"/index.php/wp-json",
                                                      PermalinkVariant::index_php_path}}) {
    if (path == prefix || path.starts_with(std::string(prefix) + "/")) {
      if (routes_disabled) {
        return rest_error(404, "rest_no_route", "No route was found matching the URL and request method");
      }
      if (!serves(variant)) return html_not_found();
      return handle_rest(request, std::string_view(path).substr(prefix.size()));
    }
  }

  if (path == "/" || path == "/index.php") return homepage(request);
  if (path == "/feed" || path == "/feed/") return feed(request);
  if (path == "/readme.html") return readme();
  if (path.starts_with("/wp-includes/") || path.starts_with("/wp-content/")) {
    MockResponse r;
    r.content_type = path.ends_with(".js") ? "application/javascript" : "text/css";
    r.body = "/* static asset */\n";
    return r;
  }
  return html_not_found();
}

MockResponse MockSite::handle_rest(const MockRequest& request, std::string_view route) {
  while (route.size() > 1 && route.back() == '/') route.remove_suffix(1);
  if (route.empty() || route == "/") {
    if (request.method != "GET") return rest_error(404, "rest_no_route", "No route was found matching the URL and request method");
    return rest_index(request);
  }

  constexpr std::string_view kPosts = "/wp/v2/posts";
  if (route == kPosts) {
    if (request.method == "GET") return handle_get_posts(request);
    return rest_error(401, "rest_cannot_create", "Sorry, you are not allowed to create posts as this user.");
  }
  if (route.starts_with(std::string(kPosts) + "/")) {
    const std::string_view path_id = route.substr(kPosts.size() + 1);
    const auto query_id = first_param(request, "id");
    if (request.method == "GET") return handle_get_post(request, path_id, query_id);
    if (request.method == "POST" || request.method == "PUT" || request.method == "PATCH") {
      return handle_update_post(request, path_id, query_id, request.body);
    }
  }
  return rest_error(404, "rest_no_route", "No route was found matching the URL and request method");
}

MockResponse MockSite::handle_get_posts(const MockRequest& request) const {
  if (spec_.behavior == SiteBehavior::routes_disabled || spec_.behavior == SiteBehavior::not_wordpress) {
    return rest_error(404, "rest_no_route", "No route was found matching the URL and request method");
  }
  ordered_json posts = ordered_json::array();
  for (const auto& [id, post] : store_.snapshot()) posts.push_back(post_json(id, post, request.base_url));
  MockResponse r = json_response(200, posts);
  r.headers.emplace_back("X-WP-Total", std::to_string(posts.size()));
  r.headers.emplace_back("X-WP-TotalPages", "1");
  return r;
}

MockResponse MockSite::handle_get_post(const MockRequest& request, std::string_view path_id,
                                       const std::optional<std::string>& query_id) const {
  const std::string effective = query_id ? *query_id : std::string(path_id);
  if (spec_.behavior == SiteBehavior::patched && !is_numeric_id(effective)) {
    return rest_error(404, "rest_post_invalid_id", "Invalid post ID.");
  }
  const std::int64_t id = leading_integer(effective);
  const auto post = store_.find(id);
  if (!post) return rest_error(404, "rest_post_invalid_id", "Invalid post ID.");
  return json_response(200, post_json(id, *post, request.base_url));
}

MockResponse MockSite::handle_update_post(const MockRequest& request, std::string_view path_id,
                                          const std::optional<std::string>& query_id,
                                          std::string_view body) {
  const std::string effective = query_id ? *query_id : std::string(path_id);
  if (spec_.behavior == SiteBehavior::patched) {
    if (!is_numeric_id(effective)) return rest_error(404, "rest_post_invalid_id", "Invalid post ID.");
    return rest_error(401, "rest_cannot_edit", "Sorry, you are not allowed to edit this post.");
  }

  const json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return rest_error(400, "rest_invalid_json", "Invalid JSON body passed.");
  }
  // No permission check: the coerced id reaches update_item directly.
  const std::int64_t id = leading_integer(effective);
  const auto updated = store_.update(id, text_field(doc, "title"), text_field(doc, "content"));
  if (!updated) return rest_error(404, "rest_post_invalid_id", "Invalid post ID.");
  return json_response(200, post_json(id, *updated, request.base_url));
}

MockResponse MockSite::homepage(const MockRequest& request) const {
  const std::string& base = request.base_url;
  MockResponse r;
  if (spec_.behavior == SiteBehavior::not_wordpress) {
    r.body =
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">\n"
        "<meta name=\"generator\" content=\"Hugo 0.92.0\">\n"
        "<title>" + spec_.site_id + "</title>\n"
        "<link rel=\"stylesheet\" href=\"" + base + "/css/main.css?ver=2.1.3\">\n"
        "</head><body><h1>Welcome</h1></body></html>\n";
    return r;
  }

  const std::string ver = version_text();
  const std::string query = ver.empty() ? "" : "?ver=" + ver;
  r.body = "<!DOCTYPE html>\n<html lang=\"en-US\"><head>\n<meta charset=\"UTF-8\">\n<title>" +
           spec_.site_id + " &#8211; Just another WordPress site</title>\n";
  r.body += "<link rel='stylesheet' id='twentyseventeen-style-css' href='" + base +
            "/wp-content/themes/twentyseventeen/style.css?ver=1.1' type='text/css' media='all' />\n";
  r.body += "<link rel='stylesheet' id='dashicons-css' href='" + base +
            "/wp-includes/css/dashicons.min.css" + query + "' type='text/css' media='all' />\n";
  r.body += "<script type='text/javascript' src='" + base + "/wp-includes/js/jquery/jquery-migrate.min.js" +
            query + "'></script>\n";
  r.body += "<meta name=\"generator\" content=\"" + spec_.version_string + "\" />\n";
  r.body += "</head>\n<body class=\"home blog\">\n";
  for (const auto& [id, post] : store_.snapshot()) {
    r.body += "<article id=\"post-" + std::to_string(id) + "\"><h2><a href=\"" + base + "/?p=" +
              std::to_string(id) + "\">" + post.title + "</a></h2></article>\n";
  }
  r.body += "<script type='text/javascript' src='" + base + "/wp-includes/js/wp-embed.min.js" + query +
            "'></script>\n</body></html>\n";

  if (spec_.behavior != SiteBehavior::routes_disabled) {
    std::string api_root;
    if (serves(PermalinkVariant::plain_path)) {
      api_root = base + "/wp-json/";
    } else if (serves(PermalinkVariant::index_php_path)) {
      api_root = base + "/index.php/wp-json/";
    } else {
      api_root = base + "/?rest_route=/";
    }
    r.headers.emplace_back("Link", "<" + api_root + ">; rel=\"https://api.w.org/\"");
  }
  return r;
}

MockResponse MockSite::feed(const MockRequest& request) const {
  MockResponse r;
  r.content_type = "application/rss+xml; charset=UTF-8";
  r.body = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<rss version=\"2.0\">\n<channel>\n<title>" +
           spec_.site_id + "</title>\n<link>" + request.base_url + "</link>\n";
  if (!version_text().empty()) {
    r.body += "<generator>https://wordpress.org/?v=" + version_text() + "</generator>\n";
  }
  for (const auto& [id, post] : store_.snapshot()) {
    r.body += "<item><title>" + post.title + "</title><guid isPermaLink=\"false\">" + request.base_url +
              "/?p=" + std::to_string(id) + "</guid></item>\n";
  }
  r.body += "</channel>\n</rss>\n";
  return r;
}

MockResponse MockSite::readme() const {
  MockResponse r;
  r.body =
      "<!DOCTYPE html>\n<html>\n<head>\n<title>WordPress &#8250; ReadMe</title>\n</head>\n<body>\n"
      "<h1 id=\"logo\">\n\t<a href=\"https://wordpress.org/\"><img alt=\"WordPress\" "
      "src=\"wp-admin/images/wordpress-logo.png\" /></a>\n";
  if (!version_text().empty()) r.body += "\t<br /> Version " + version_text() + "\n";
  r.body += "</h1>\n<p style=\"text-align: center\">Semantic Personal Publishing Platform</p>\n</body>\n</html>\n";
  return r;
}

MockResponse MockSite::rest_index(const MockRequest& request) const {
  ordered_json index;
  index["name"] = spec_.site_id;
  index["description"] = "Just another WordPress site";
  index["url"] = request.base_url;
  index["home"] = request.base_url;
  index["namespaces"] = {"oembed/1.0", "wp/v2"};
  index["authentication"] = ordered_json::array();
  MockResponse r = json_response(200, index);
  r.headers.emplace_back("Link", "<" + request.base_url + "/wp-json/>; rel=\"https://api.w.org/\"");
  return r;
}

}  // namespace wpcis::mock

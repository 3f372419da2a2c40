#include "support.hpp"

#include <cctype>

namespace wpcis::testing {

void FakeHttpClient::set(const std::string& url, int status, std::string body, Headers headers) {
  responses_[url] = HttpResponse{status, std::move(headers), std::move(body)};
}

void FakeHttpClient::fail(const std::string& url, TransportErrorKind kind) { failures_[url] = kind; }

HttpResponse FakeHttpClient::get(const std::string& url, const Headers&) {
  requested.push_back("GET " + url);
  if (fail_all_) throw TransportError(*fail_all_, url);
  if (const auto f = failures_.find(url); f != failures_.end()) throw TransportError(f->second, url);
  if (const auto r = responses_.find(url); r != responses_.end()) return r->second;
  return HttpResponse{404, {}, "<html>Not Found</html>"};
}

HttpResponse FakeHttpClient::post(const std::string& url, const Headers& headers, const std::string&,
                                  const std::string&) {
  requested.push_back("POST " + url);
  return get(url, headers);
}

NetworkClient local_client(int timeout_ms) {
  HttpClientConfig config;
  config.timeout = std::chrono::milliseconds(timeout_ms);
  return NetworkClient(config);
}

mock::SeedPost seed_post(std::int64_t id, std::string title, std::string content) {
  mock::SeedPost p;
  p.id = id;
  p.title = std::move(title);
  p.content = std::move(content);
  p.slug = "post-" + std::to_string(id);
  p.date = "2017-03-29T13:52:56";
  p.date_gmt = "2017-03-29T20:52:56";
  p.modified = "2017-03-29T13:53:12";
  p.modified_gmt = "2017-03-29T20:53:12";
  return p;
}

mock::MockSiteSpec site(std::string id, std::string version, mock::SiteBehavior behavior,
                        mock::PermalinkVariant variant, std::vector<mock::SeedPost> posts) {
  mock::MockSiteSpec s;
  s.site_id = std::move(id);
  s.version_string = std::move(version);
  s.behavior = behavior;
  s.permalink_variant = variant;
  s.posts_seed = std::move(posts);
  return s;
}

std::int64_t reference_leading_integer(const std::string& text) {
  std::size_t n = 0;
  while (n < text.size() && std::isdigit(static_cast<unsigned char>(text[n]))) ++n;
  return n == 0 ? 0 : std::stoll(text.substr(0, n));
}

}  // namespace wpcis::testing

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "wpcis/http_client.hpp"
#include "wpcis/mock_target.hpp"

namespace wpcis::testing {

/// In-memory HttpClient: canned responses per exact URL, 404 for anything
/// else, TransportError for URLs marked unreachable.
class FakeHttpClient final : public HttpClient {
 public:
  void set(const std::string& url, int status, std::string body, Headers headers = {});
  void fail(const std::string& url, TransportErrorKind kind = TransportErrorKind::connection);
  void fail_all(TransportErrorKind kind = TransportErrorKind::connection) { fail_all_ = kind; }

  HttpResponse get(const std::string& url, const Headers& headers) override;
  HttpResponse post(const std::string& url, const Headers& headers, const std::string& body,
                    const std::string& content_type) override;

  std::vector<std::string> requested;  // "GET url" / "POST url"

 private:
  std::map<std::string, HttpResponse> responses_;
  std::map<std::string, TransportErrorKind> failures_;
  std::optional<TransportErrorKind> fail_all_;
};

/// NetworkClient with a short timeout for local tests.
NetworkClient local_client(int timeout_ms = 3000);

mock::SeedPost seed_post(std::int64_t id, std::string title = "Hello", std::string content = "Body");

mock::MockSiteSpec site(std::string id, std::string version, mock::SiteBehavior behavior,
                        mock::PermalinkVariant variant = mock::PermalinkVariant::all,
                        std::vector<mock::SeedPost> posts = {seed_post(123907)});

/// Leading-integer cast written independently of the library.
std::int64_t reference_leading_integer(const std::string& text);

}  // namespace wpcis::testing

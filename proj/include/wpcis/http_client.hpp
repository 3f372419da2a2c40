#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wpcis/errors.hpp"

namespace wpcis {

using Headers = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  Headers headers;
  std::string body;

  /// Case-insensitive lookup of the first header named `name`.
  std::optional<std::string> header(std::string_view name) const;
};

enum class TransportErrorKind { timeout, connection, read, write, tls, redirect, other };

std::string_view to_string(TransportErrorKind kind) noexcept;

/// Failure below the HTTP layer: nothing usable came back from the peer.
class TransportError : public Error {
 public:
  TransportError(TransportErrorKind kind, const std::string& url);

  TransportErrorKind kind() const noexcept { return kind_; }
  const std::string& url() const noexcept { return url_; }

 private:
  TransportErrorKind kind_;
  std::string url_;
};

/// The only way the scanner talks to a target. Implementations throw
/// TransportError when no HTTP response was obtained; any status code,
/// including 4xx/5xx, is returned normally.
class HttpClient {
 public:
  virtual ~HttpClient() = default;

  virtual HttpResponse get(const std::string& url, const Headers& headers) = 0;
  virtual HttpResponse post(const std::string& url, const Headers& headers,
                            const std::string& body,
                            const std::string& content_type) = 0;
};

inline constexpr std::string_view kUserAgent = "wpcis-scanner/1.0";

struct HttpClientConfig {
  std::chrono::milliseconds timeout{10000};
  int max_redirects = 5;
  std::string user_agent{kUserAgent};
};

/// Absolute http(s) URL split for the transport.
struct UrlParts {
  std::string scheme;
  std::string host;  // without brackets for IPv6
  std::uint16_t port = 0;
  std::string path_and_query;  // always starts with "/"

  std::string origin() const;
};

std::optional<UrlParts> split_url(std::string_view url);

/// cpp-httplib backed client. Redirects are followed only within the same
/// host, at most `max_redirects` times. Not thread-safe; give each worker its
/// own instance.
class NetworkClient final : public HttpClient {
 public:
  explicit NetworkClient(HttpClientConfig config = {});

  HttpResponse get(const std::string& url, const Headers& headers) override;
  HttpResponse post(const std::string& url, const Headers& headers,
                    const std::string& body,
                    const std::string& content_type) override;

  const HttpClientConfig& config() const noexcept { return config_; }

 private:
  HttpResponse send(const std::string& method, const std::string& url,
                    const Headers& headers, const std::string* body,
                    const std::string& content_type);

  HttpClientConfig config_;
};

/// Caps in-flight requests per host:port across all workers sharing it.
class HostLimiter {
 public:
  explicit HostLimiter(std::size_t per_host = 2);

  class Slot {
   public:
    Slot(HostLimiter* owner, std::string key);
    Slot(Slot&& other) noexcept;
    Slot& operator=(Slot&&) = delete;
    Slot(const Slot&) = delete;
    ~Slot();

   private:
    HostLimiter* owner_;
    std::string key_;
  };

  Slot acquire(const std::string& key);
  std::size_t per_host() const noexcept { return per_host_; }
  std::size_t peak_in_flight() const;

 private:
  void release(const std::string& key);

  std::size_t per_host_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, std::size_t> in_flight_;
  std::size_t peak_ = 0;
};

/// Decorator that holds a HostLimiter slot for the duration of each request.
class PoliteClient final : public HttpClient {
 public:
  PoliteClient(HttpClient& inner, HostLimiter& limiter);

  HttpResponse get(const std::string& url, const Headers& headers) override;
  HttpResponse post(const std::string& url, const Headers& headers,
                    const std::string& body,
                    const std::string& content_type) override;

 private:
  std::string key_for(const std::string& url) const;

  HttpClient& inner_;
  HostLimiter& limiter_;
};

}  // namespace wpcis

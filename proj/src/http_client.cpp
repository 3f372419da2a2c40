#include "wpcis/http_client.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <charconv>

namespace wpcis {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string describe(TransportErrorKind kind, const std::string& url) {
  return "transport failure (" + std::string(to_string(kind)) + ") fetching " + url;
}

TransportErrorKind classify(httplib::Error error, std::chrono::steady_clock::duration elapsed,
                            std::chrono::milliseconds timeout) {
  const bool ran_out = elapsed + std::chrono::milliseconds(50) >= timeout;
  switch (error) {
    case httplib::Error::ConnectionTimeout:
      return TransportErrorKind::timeout;
    case httplib::Error::Connection:
    case httplib::Error::BindIPAddress:
    case httplib::Error::ProxyConnection:
      return ran_out ? TransportErrorKind::timeout : TransportErrorKind::connection;
    case httplib::Error::Read:
      return ran_out ? TransportErrorKind::timeout : TransportErrorKind::read;
    case httplib::Error::Write:
      return ran_out ? TransportErrorKind::timeout : TransportErrorKind::write;
    case httplib::Error::SSLConnection:
    case httplib::Error::SSLLoadingCerts:
    case httplib::Error::SSLServerVerification:
      return TransportErrorKind::tls;
    case httplib::Error::ExceedRedirectCount:
      return TransportErrorKind::redirect;
    default:
      return TransportErrorKind::other;
  }
}

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

// Resolves a Location header against the URL that produced it.
std::optional<UrlParts> resolve_location(const UrlParts& base, std::string_view location) {
  if (location.find("://") != std::string_view::npos) return split_url(location);
  if (location.starts_with("//")) return split_url(base.scheme + ":" + std::string(location));
  UrlParts next = base;
  if (location.starts_with("/")) {
    next.path_and_query = std::string(location);
  } else {
    std::string_view path = base.path_and_query;
    path = path.substr(0, path.find('?'));
    const auto slash = path.rfind('/');
    next.path_and_query = std::string(path.substr(0, slash + 1)) + std::string(location);
  }
  return next;
}

}  // namespace

std::optional<std::string> HttpResponse::header(std::string_view name) const {
  for (const auto& [key, value] : headers) {
    if (iequals(key, name)) return value;
  }
  return std::nullopt;
}

std::string_view to_string(TransportErrorKind kind) noexcept {
  switch (kind) {
    case TransportErrorKind::timeout: return "timeout";
    case TransportErrorKind::connection: return "connection";
    case TransportErrorKind::read: return "read";
    case TransportErrorKind::write: return "write";
    case TransportErrorKind::tls: return "tls";
    case TransportErrorKind::redirect: return "redirect";
    case TransportErrorKind::other: return "other";
  }
  return "other";
}

TransportError::TransportError(TransportErrorKind kind, const std::string& url)
    : Error(ErrorCode::NetworkUnreachable, describe(kind, url)), kind_(kind), url_(url) {}

std::string UrlParts::origin() const {
  std::string out = scheme + "://";
  out += host.find(':') != std::string::npos ? "[" + host + "]" : host;
  out += ':' + std::to_string(port);
  return out;
}

std::optional<UrlParts> split_url(std::string_view url) {
  UrlParts parts;
  const auto sep = url.find("://");
  if (sep == std::string_view::npos) return std::nullopt;
  parts.scheme = lower(url.substr(0, sep));
  if (parts.scheme != "http" && parts.scheme != "https") return std::nullopt;
  std::string_view rest = url.substr(sep + 3);
  const auto path_start = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, path_start);
  std::string_view tail = path_start == std::string_view::npos ? "" : rest.substr(path_start);
  tail = tail.substr(0, tail.find('#'));

  std::string_view port_text;
  if (!authority.empty() && authority.front() == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    parts.host = std::string(authority.substr(1, close - 1));
    if (close + 1 < authority.size()) {
      if (authority[close + 1] != ':') return std::nullopt;
      port_text = authority.substr(close + 2);
    }
  } else {
    const auto colon = authority.rfind(':');
    parts.host = std::string(authority.substr(0, colon));
    if (colon != std::string_view::npos) port_text = authority.substr(colon + 1);
  }
  if (parts.host.empty()) return std::nullopt;
  parts.host = lower(parts.host);

  parts.port = parts.scheme == "https" ? 443 : 80;
  if (!port_text.empty()) {
    unsigned value = 0;
    const auto [ptr, ec] =
        std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || value == 0 ||
        value > 65535) {
      return std::nullopt;
    }
    parts.port = static_cast<std::uint16_t>(value);
  }

  parts.path_and_query = std::string(tail);
  if (parts.path_and_query.empty() || parts.path_and_query.front() != '/') {
    parts.path_and_query.insert(0, "/");
  }
  return parts;
}

NetworkClient::NetworkClient(HttpClientConfig config) : config_(std::move(config)) {}

HttpResponse NetworkClient::get(const std::string& url, const Headers& headers) {
  return send("GET", url, headers, nullptr, {});
}

HttpResponse NetworkClient::post(const std::string& url, const Headers& headers,
                                 const std::string& body, const std::string& content_type) {
  return send("POST", url, headers, &body, content_type);
}

HttpResponse NetworkClient::send(const std::string& method, const std::string& url,
                                 const Headers& headers, const std::string* body,
                                 const std::string& content_type) {
  auto parts = split_url(url);
  if (!parts) throw TransportError(TransportErrorKind::other, url);

  std::string current = url;
  std::string verb = method;
  for (int hop = 0;; ++hop) {
    httplib::Client client(parts->origin());
    const auto ms = config_.timeout.count();
    const auto sec = static_cast<time_t>(ms / 1000);
    const auto usec = static_cast<time_t>((ms % 1000) * 1000);
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    client.set_follow_location(false);
    client.set_keep_alive(false);

    httplib::Headers request_headers;
    for (const auto& [key, value] : headers) request_headers.emplace(key, value);
    request_headers.emplace("User-Agent", config_.user_agent);

    const auto started = std::chrono::steady_clock::now();
    httplib::Result result = (verb == "POST" && body != nullptr)
                                 ? client.Post(parts->path_and_query, request_headers, *body,
                                               content_type)
                                 : client.Get(parts->path_and_query, request_headers);
    if (!result) {
      throw TransportError(
          classify(result.error(), std::chrono::steady_clock::now() - started, config_.timeout),
          current);
    }

    HttpResponse response;
    response.status = result->status;
    response.body = std::move(result->body);
    for (const auto& [key, value] : result->headers) response.headers.emplace_back(key, value);

    if (!is_redirect(response.status) || hop >= config_.max_redirects) return response;
    const auto location = response.header("Location");
    if (!location) return response;
    auto next = resolve_location(*parts, *location);
    if (!next || next->host != parts->host) return response;

    if (response.status == 303 || ((response.status == 301 || response.status == 302) && verb == "POST")) {
      verb = "GET";
      body = nullptr;
    }
    parts = std::move(next);
    current = parts->origin() + parts->path_and_query;
  }
}

HostLimiter::HostLimiter(std::size_t per_host) : per_host_(per_host == 0 ? 1 : per_host) {}

HostLimiter::Slot::Slot(HostLimiter* owner, std::string key) : owner_(owner), key_(std::move(key)) {}

HostLimiter::Slot::Slot(Slot&& other) noexcept
    : owner_(std::exchange(other.owner_, nullptr)), key_(std::move(other.key_)) {}

HostLimiter::Slot::~Slot() {
  if (owner_ != nullptr) owner_->release(key_);
}

HostLimiter::Slot HostLimiter::acquire(const std::string& key) {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return in_flight_[key] < per_host_; });
  const auto now = ++in_flight_[key];
  peak_ = std::max(peak_, now);
  return Slot(this, key);
}

std::size_t HostLimiter::peak_in_flight() const {
  std::lock_guard lock(mu_);
  return peak_;
}

void HostLimiter::release(const std::string& key) {
  {
    std::lock_guard lock(mu_);
    if (--in_flight_[key] == 0) in_flight_.erase(key);
  }
  cv_.notify_all();
}

PoliteClient::PoliteClient(HttpClient& inner, HostLimiter& limiter)
    : inner_(inner), limiter_(limiter) {}

std::string PoliteClient::key_for(const std::string& url) const {
  const auto parts = split_url(url);
  return parts ? parts->host + ':' + std::to_string(parts->port) : url;
}

HttpResponse PoliteClient::get(const std::string& url, const Headers& headers) {
  auto slot = limiter_.acquire(key_for(url));
  return inner_.get(url, headers);
}

HttpResponse PoliteClient::post(const std::string& url, const Headers& headers,
                                const std::string& body, const std::string& content_type) {
  auto slot = limiter_.acquire(key_for(url));
  return inner_.post(url, headers, body, content_type);
}

}  // namespace wpcis

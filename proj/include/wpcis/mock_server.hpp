#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "wpcis/mock_target.hpp"

namespace httplib {
class Server;
struct Request;
struct Response;
}  // namespace httplib

namespace wpcis::mock {

enum class Routing {
  path_prefix,  // /site/{site_id}/...
  host_header,  // Host: {site_id}[:port]
};

struct RequestLogEntry {
  std::string site_id;
  std::string method;
  std::string path;  // site-relative path plus raw query
};

/// HTTP front end for a fleet of MockSites.
class MockServer {
 public:
  MockServer(std::vector<MockSiteSpec> specs, Routing routing = Routing::path_prefix);
  ~MockServer();

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  /// Binds and starts serving on a background thread. Port 0 picks a free
  /// port. Throws Error(BindFailure).
  void start(const std::string& host, int port);
  /// Graceful shutdown; idempotent.
  void stop();

  int port() const noexcept { return port_; }
  const std::string& host() const noexcept { return host_; }
  std::string base_url(std::string_view site_id) const;
  std::vector<std::string> site_ids() const;

  /// Throws Error(UnknownSite).
  std::string store_hash(std::string_view site_id) const;
  MockSite& site(std::string_view site_id);

  std::vector<RequestLogEntry> request_log() const;
  std::size_t count_requests(std::string_view method) const;
  void clear_log();

 private:
  void dispatch(const httplib::Request& req, httplib::Response& res);

  Routing routing_;
  std::map<std::string, std::unique_ptr<MockSite>, std::less<>> sites_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;

  mutable std::mutex log_mu_;
  std::vector<RequestLogEntry> log_;
};

/// Parses "host:port" and starts a server for `specs`. Throws
/// Error(BindFailure) or Error(InvalidArgument).
std::unique_ptr<MockServer> serve_fleet(std::vector<MockSiteSpec> specs,
                                        std::string_view bind_address,
                                        Routing routing = Routing::path_prefix);

}  // namespace wpcis::mock

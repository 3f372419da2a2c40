#include "wpcis/mock_server.hpp"

#include <httplib.h>

#include <charconv>

#include "wpcis/errors.hpp"

namespace wpcis::mock {
namespace {

constexpr std::string_view kSitePrefix = "/site/";

std::string strip_port(const std::string& host) {
  if (!host.empty() && host.front() == '[') return host.substr(0, host.find(']') + 1);
  return host.substr(0, host.rfind(':'));
}

}  // namespace

MockServer::MockServer(std::vector<MockSiteSpec> specs, Routing routing) : routing_(routing) {
  for (auto& spec : specs) {
    std::string id = spec.site_id;
    auto site = std::make_unique<MockSite>(std::move(spec));
    if (!sites_.emplace(id, std::move(site)).second) {
      throw Error(ErrorCode::ConfigParseError, "duplicate site_id '" + id + "'");
    }
  }
}

MockServer::~MockServer() { stop(); }

void MockServer::start(const std::string& host, int port) {
  if (server_) throw Error(ErrorCode::InvalidArgument, "mock server already started");
  server_ = std::make_unique<httplib::Server>();
  auto handler = [this](const httplib::Request& req, httplib::Response& res) { dispatch(req, res); };
  server_->Get(".*", handler);
  server_->Post(".*", handler);
  server_->Put(".*", handler);
  server_->Patch(".*", handler);
  // httplib's default sets SO_REUSEPORT, which lets a second server share a
  // busy port; keep bind failures visible.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) {
    server_.reset();
    port_ = 0;
    throw Error(ErrorCode::BindFailure,
                "cannot bind " + host + ":" + std::to_string(port));
  }
  host_ = host;
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void MockServer::stop() {
  if (!server_) return;
  server_->stop();
  if (thread_.joinable()) thread_.join();
  server_.reset();
}

std::string MockServer::base_url(std::string_view site_id) const {
  const std::string authority =
      (host_.find(':') != std::string::npos ? "[" + host_ + "]" : host_) + ":" + std::to_string(port_);
  if (routing_ == Routing::host_header) return "http://" + std::string(site_id) + ":" + std::to_string(port_);
  return "http://" + authority + std::string(kSitePrefix) + std::string(site_id);
}

std::vector<std::string> MockServer::site_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, _] : sites_) ids.push_back(id);
  return ids;
}

MockSite& MockServer::site(std::string_view site_id) {
  const auto it = sites_.find(site_id);
  if (it == sites_.end()) {
    throw Error(ErrorCode::UnknownSite, "unknown site '" + std::string(site_id) + "'");
  }
  return *it->second;
}

std::string MockServer::store_hash(std::string_view site_id) const {
  const auto it = sites_.find(site_id);
  if (it == sites_.end()) {
    throw Error(ErrorCode::UnknownSite, "unknown site '" + std::string(site_id) + "'");
  }
  return it->second->store_hash();
}

std::vector<RequestLogEntry> MockServer::request_log() const {
  std::lock_guard lock(log_mu_);
  return log_;
}

std::size_t MockServer::count_requests(std::string_view method) const {
  std::lock_guard lock(log_mu_);
  return static_cast<std::size_t>(std::count_if(
      log_.begin(), log_.end(), [&](const RequestLogEntry& e) { return e.method == method; }));
}

void MockServer::clear_log() {
  std::lock_guard lock(log_mu_);
  log_.clear();
}

void MockServer::dispatch(const httplib::Request& req, httplib::Response& res) {
  const std::string host_header = req.get_header_value("Host");
  std::string site_id;
  std::string path;
  std::string base;

  if (routing_ == Routing::path_prefix) {
    if (!req.path.starts_with(kSitePrefix)) {
      res.status = 404;
      res.set_content("unknown site\n", "text/plain");
      return;
    }
    const std::string_view rest = std::string_view(req.path).substr(kSitePrefix.size());
    const auto slash = rest.find('/');
    site_id = std::string(rest.substr(0, slash));
    path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    const std::string authority =
        host_header.empty() ? host_ + ":" + std::to_string(port_) : host_header;
    base = "http://" + authority + std::string(kSitePrefix) + site_id;
  } else {
    site_id = strip_port(host_header);
    path = req.path.empty() ? "/" : req.path;
    base = "http://" + host_header;
  }

  const auto it = sites_.find(site_id);
  if (it == sites_.end()) {
    res.status = 404;
    res.set_content("unknown site\n", "text/plain");
    return;
  }
  MockSite& site = *it->second;

  {
    const auto query = req.target.find('?');
    std::lock_guard lock(log_mu_);
    log_.push_back({site_id, req.method,
                    path + (query == std::string::npos ? "" : req.target.substr(query))});
  }

  if (site.spec().latency_ms > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(site.spec().latency_ms));
  }

  MockRequest request;
  request.method = req.method;
  request.path = path;
  for (const auto& [key, value] : req.params) request.params.emplace(key, value);
  request.body = req.body;
  request.base_url = base;

  const MockResponse response = site.handle(request);
  res.status = response.status;
  for (const auto& [key, value] : response.headers) res.set_header(key, value);
  res.set_content(response.body, response.content_type);
}

std::unique_ptr<MockServer> serve_fleet(std::vector<MockSiteSpec> specs, std::string_view bind_address,
                                        Routing routing) {
  if (specs.empty()) throw Error(ErrorCode::InvalidArgument, "fleet must contain at least one site");
  const auto colon = bind_address.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(ErrorCode::InvalidArgument, "bind address must be host:port, got '" +
                                                std::string(bind_address) + "'");
  }
  std::string host(bind_address.substr(0, colon));
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  const auto port_text = bind_address.substr(colon + 1);
  int port = -1;
  const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    throw Error(ErrorCode::InvalidArgument, "invalid port in bind address '" + std::string(bind_address) + "'");
  }
  auto server = std::make_unique<MockServer>(std::move(specs), routing);
  server->start(host, port);
  return server;
}

}  // namespace wpcis::mock

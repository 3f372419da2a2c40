#include "wpcis/target.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "wpcis/errors.hpp"

namespace wpcis {
namespace {

[[noreturn]] void malformed(std::string_view raw, std::string_view why) {
  throw Error(ErrorCode::MalformedUrl,
              "malformed URL '" + std::string(raw) + "': " + std::string(why));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  }
  return true;
}

bool valid_host_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_';
}

}  // namespace

std::string_view to_string(Scheme scheme) noexcept {
  return scheme == Scheme::https ? "https" : "http";
}

std::uint16_t default_port(Scheme scheme) noexcept {
  return scheme == Scheme::https ? 443 : 80;
}

std::string TargetUrl::str() const {
  std::string out{to_string(scheme)};
  out += "://";
  if (host.find(':') != std::string::npos) {
    out += '[' + host + ']';
  } else {
    out += host;
  }
  if (port != default_port(scheme)) {
    out += ':' + std::to_string(port);
  }
  out += base_path;
  return out;
}

TargetUrl normalize_target(std::string_view raw) {
  const std::string_view text = trim(raw);
  if (text.empty()) malformed(raw, "empty");

  TargetUrl url;
  std::string_view rest = text;
  if (const auto sep = rest.find("://"); sep != std::string_view::npos) {
    if (iequals_prefix(rest, "https://")) {
      url.scheme = Scheme::https;
    } else if (iequals_prefix(rest, "http://")) {
      url.scheme = Scheme::http;
    } else {
      malformed(raw, "unsupported scheme");
    }
    rest.remove_prefix(sep + 3);
  }
  if (rest.find_first_of("?#") != std::string_view::npos) {
    malformed(raw, "query or fragment not allowed in a target");
  }

  const auto path_start = rest.find('/');
  std::string_view authority = rest.substr(0, path_start);
  std::string_view path =
      path_start == std::string_view::npos ? std::string_view{} : rest.substr(path_start);

  if (authority.empty()) malformed(raw, "missing host");
  if (authority.find('@') != std::string_view::npos) malformed(raw, "userinfo not allowed");

  std::string_view host;
  std::string_view port_text;
  if (authority.front() == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos || close == 1) malformed(raw, "bad IPv6 literal");
    host = authority.substr(1, close - 1);
    const auto after = authority.substr(close + 1);
    if (!after.empty()) {
      if (after.front() != ':') malformed(raw, "junk after IPv6 literal");
      port_text = after.substr(1);
      if (port_text.empty()) malformed(raw, "empty port");
    }
    for (char c : host) {
      if (!std::isxdigit(static_cast<unsigned char>(c)) && c != ':' && c != '.') {
        malformed(raw, "bad IPv6 literal");
      }
    }
  } else {
    const auto colon = authority.find(':');
    host = authority.substr(0, colon);
    if (colon != std::string_view::npos) {
      port_text = authority.substr(colon + 1);
      if (port_text.empty()) malformed(raw, "empty port");
    }
    if (host.empty()) malformed(raw, "missing host");
    if (!std::all_of(host.begin(), host.end(), valid_host_char)) {
      malformed(raw, "invalid character in host");
    }
    if (host.front() == '.' || host.front() == '-' || host.find("..") != std::string_view::npos) {
      malformed(raw, "invalid host");
    }
  }

  url.host.reserve(host.size());
  for (char c : host) url.host += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (url.host.back() == '.') url.host.pop_back();
  if (url.host.empty()) malformed(raw, "missing host");

  url.port = default_port(url.scheme);
  if (!port_text.empty()) {
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || value == 0 ||
        value > 65535) {
      malformed(raw, "port out of range");
    }
    url.port = static_cast<std::uint16_t>(value);
  }

  for (char c : path) {
    if (std::isspace(static_cast<unsigned char>(c)) || std::iscntrl(static_cast<unsigned char>(c))) {
      malformed(raw, "whitespace in path");
    }
  }
  while (!path.empty() && path.back() == '/') path.remove_suffix(1);
  url.base_path = std::string(path);
  return url;
}

}  // namespace wpcis

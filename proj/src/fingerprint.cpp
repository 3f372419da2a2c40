#include "wpcis/fingerprint.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include <json.hpp>

namespace wpcis {
namespace {

bool icontains(std::string_view haystack, std::string_view needle) {
  const auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                              [](char a, char b) {
                                return std::tolower(static_cast<unsigned char>(a)) ==
                                       std::tolower(static_cast<unsigned char>(b));
                              });
  return it != haystack.end();
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && icontains(s.substr(0, prefix.size()), prefix);
}

const std::regex& meta_tag_re() {
  static const std::regex re(R"(<meta\b[^>]*>)", std::regex::icase);
  return re;
}

const std::regex& name_attr_re() {
  static const std::regex re(R"re(\bname\s*=\s*["']([^"']*)["'])re", std::regex::icase);
  return re;
}

const std::regex& content_attr_re() {
  static const std::regex re(R"re(\bcontent\s*=\s*["']([^"']*)["'])re", std::regex::icase);
  return re;
}

bool ok(const HttpResponse& r) { return r.status >= 200 && r.status < 300; }

const Headers kHtmlAccept = {{"Accept", "text/html,application/xhtml+xml,*/*"}};
const Headers kJsonAccept = {{"Accept", "application/json"}};

}  // namespace

std::string_view to_string(EvidenceSource source) noexcept {
  switch (source) {
    case EvidenceSource::meta_generator: return "meta_generator";
    case EvidenceSource::feed_generator: return "feed_generator";
    case EvidenceSource::readme_page: return "readme_page";
    case EvidenceSource::asset_query_version: return "asset_query_version";
    case EvidenceSource::rest_header: return "rest_header";
  }
  return "rest_header";
}

int evidence_priority(EvidenceSource source) noexcept {
  switch (source) {
    case EvidenceSource::readme_page: return 0;
    case EvidenceSource::asset_query_version: return 1;
    case EvidenceSource::feed_generator: return 2;
    case EvidenceSource::meta_generator: return 3;
    case EvidenceSource::rest_header: return 4;
  }
  return 4;
}

FingerprintEvidence make_evidence(EvidenceSource source, std::string raw_text) {
  FingerprintEvidence e;
  e.source = source;
  e.priority = evidence_priority(source);
  if (source != EvidenceSource::rest_header) e.parsed_version = find_version(raw_text);
  e.raw_text = std::move(raw_text);
  return e;
}

std::optional<WpVersion> resolve_version(std::span<const FingerprintEvidence> evidence) {
  const FingerprintEvidence* best = nullptr;
  auto better = [](const FingerprintEvidence& a, const FingerprintEvidence& b) {
    if (a.priority != b.priority) return a.priority < b.priority;
    const bool ap = a.parsed_version->patch.has_value();
    const bool bp = b.parsed_version->patch.has_value();
    if (ap != bp) return ap;
    if (*a.parsed_version != *b.parsed_version) return *a.parsed_version > *b.parsed_version;
    return a.raw_text < b.raw_text;
  };
  for (const auto& e : evidence) {
    if (!e.parsed_version) continue;
    if (best == nullptr || better(e, *best)) best = &e;
  }
  if (best == nullptr) return std::nullopt;
  return best->parsed_version;
}

namespace extract {

std::optional<FingerprintEvidence> meta_generator(std::string_view html) {
  const std::string text(html);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), meta_tag_re());
       it != std::sregex_iterator(); ++it) {
    const std::string tag = it->str();
    std::smatch name;
    std::smatch content;
    if (!std::regex_search(tag, name, name_attr_re())) continue;
    if (const auto n = name[1].str(); n.size() != 9 || !istarts_with(n, "generator")) continue;
    if (!std::regex_search(tag, content, content_attr_re())) continue;
    const std::string value = content[1].str();
    if (!istarts_with(value, "WordPress")) continue;
    return make_evidence(EvidenceSource::meta_generator, value);
  }
  return std::nullopt;
}

std::optional<FingerprintEvidence> feed_generator(std::string_view xml) {
  static const std::regex re(R"(<generator[^>]*>\s*([^<]*?)\s*</generator>)", std::regex::icase);
  const std::string text(xml);
  std::smatch m;
  if (!std::regex_search(text, m, re)) return std::nullopt;
  const std::string value = m[1].str();
  if (!icontains(value, "wordpress.org")) return std::nullopt;
  return make_evidence(EvidenceSource::feed_generator, value);
}

std::optional<FingerprintEvidence> readme_page(std::string_view html) {
  static const std::regex re(R"(\bVersion\s+\d+(?:\.\d+){1,2})", std::regex::icase);
  if (!icontains(html, "WordPress")) return std::nullopt;
  const std::string text(html);
  std::smatch m;
  if (!std::regex_search(text, m, re)) return std::nullopt;
  return make_evidence(EvidenceSource::readme_page, m.str());
}

std::vector<FingerprintEvidence> asset_versions(std::string_view html) {
  static const std::regex re(
      R"re(\b(?:src|href)\s*=\s*["'][^"']*/wp-(?:includes|admin)/[^"']*?[?&](ver=[^"'&#\s]*))re",
      std::regex::icase);
  std::vector<FingerprintEvidence> out;
  std::set<std::string> seen;
  const std::string text(html);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator();
       ++it) {
    std::string raw = (*it)[1].str();
    if (seen.insert(raw).second) out.push_back(make_evidence(EvidenceSource::asset_query_version, raw));
  }
  return out;
}

std::optional<FingerprintEvidence> rest_index(const HttpResponse& response) {
  if (!ok(response)) return std::nullopt;
  if (auto link = response.header("Link"); link && icontains(*link, "api.w.org")) {
    return make_evidence(EvidenceSource::rest_header, *link);
  }
  const auto doc = nlohmann::json::parse(response.body, nullptr, false);
  if (doc.is_object() && doc.contains("namespaces") && doc["namespaces"].is_array()) {
    for (const auto& ns : doc["namespaces"]) {
      if (ns.is_string() && ns.get<std::string>() == "wp/v2") {
        return make_evidence(EvidenceSource::rest_header, "namespaces: wp/v2");
      }
    }
  }
  return std::nullopt;
}

}  // namespace extract

FingerprintResult fingerprint(const TargetUrl& target, HttpClient& http) {
  FingerprintResult result;
  const std::string base = target.str();
  int attempts = 0;

  auto fetch = [&](const std::string& url, const Headers& headers) -> std::optional<HttpResponse> {
    ++attempts;
    try {
      return http.get(url, headers);
    } catch (const TransportError& e) {
      result.fetch_errors.push_back({url, e.kind()});
      return std::nullopt;
    }
  };
  auto add = [&](std::optional<FingerprintEvidence> e) {
    if (e) result.evidence.push_back(std::move(*e));
  };

  const auto home = fetch(base + "/", kHtmlAccept);
  if (home && ok(*home)) add(extract::meta_generator(home->body));

  if (const auto feed = fetch(base + "/feed/", kHtmlAccept); feed && ok(*feed)) {
    add(extract::feed_generator(feed->body));
  }
  if (const auto readme = fetch(base + "/readme.html", kHtmlAccept); readme && ok(*readme)) {
    add(extract::readme_page(readme->body));
  }
  if (home && ok(*home)) {
    for (auto& e : extract::asset_versions(home->body)) result.evidence.push_back(std::move(e));
  }
  if (home) add(extract::rest_index(*home));
  if (const auto index = fetch(base + "/wp-json/", kJsonAccept); index) {
    auto e = extract::rest_index(*index);
    const bool duplicate =
        e && std::any_of(result.evidence.begin(), result.evidence.end(),
                         [&](const FingerprintEvidence& x) { return x == *e; });
    if (!duplicate) add(std::move(e));
  }

  if (static_cast<int>(result.fetch_errors.size()) == attempts) {
    throw Error(ErrorCode::AllProbesFailed,
                "every fingerprint fetch failed (" +
                    std::string(to_string(result.fetch_errors.front().kind)) + ") for " + base);
  }

  result.is_wordpress = !result.evidence.empty();
  result.version = resolve_version(result.evidence);
  return result;
}

}  // namespace wpcis

#include "wpcis/detector.hpp"

#include <random>

#include <json.hpp>

#include "wpcis/fingerprint.hpp"
#include "wpcis/id_coercion.hpp"
#include "wpcis/probe.hpp"

namespace wpcis {
namespace {

using nlohmann::json;

constexpr std::size_t kExcerptBytes = 512;

const Headers kJsonAccept = {{"Accept", "application/json"}};

std::string single_post_url(std::string_view endpoint_url, std::int64_t post_id) {
  std::string url(endpoint_url);
  if (url.empty() || url.back() != '/') url += '/';
  url += std::to_string(post_id);
  return url;
}

bool is_rest_error(const json& doc) {
  return doc.is_object() && doc.contains("code") && doc["code"].is_string();
}

std::string rendered_content(const json& doc) {
  if (!doc.is_object() || !doc.contains("content")) return {};
  const auto& content = doc["content"];
  if (content.is_string()) return content.get<std::string>();
  if (content.is_object() && content.contains("rendered") && content["rendered"].is_string()) {
    return content["rendered"].get<std::string>();
  }
  return {};
}

Verdict not_vulnerable(std::optional<WpVersion> version, std::string reason) {
  Verdict v;
  v.kind = VerdictKind::NotVulnerable;
  v.version = std::move(version);
  v.reason = std::move(reason);
  return v;
}

Verdict indeterminate(std::optional<WpVersion> version, std::string reason) {
  Verdict v;
  v.kind = VerdictKind::Indeterminate;
  v.version = std::move(version);
  v.reason = std::move(reason);
  return v;
}

std::string not_found(std::string_view detail) {
  return std::string(kReasonNotFound) + ": " + std::string(detail);
}

}  // namespace

std::string_view to_string(VerdictKind kind) noexcept {
  switch (kind) {
    case VerdictKind::Vulnerable: return "vulnerable";
    case VerdictKind::NotVulnerable: return "not_vulnerable";
    case VerdictKind::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

std::string_view to_string(CoercionResult result) noexcept {
  switch (result) {
    case CoercionResult::Confirmed: return "confirmed";
    case CoercionResult::Refuted: return "refuted";
    case CoercionResult::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(HttpMethod method) noexcept {
  return method == HttpMethod::POST ? "POST" : "GET";
}

InjectionRequestSpec build_injection_request(std::string_view endpoint_url, std::int64_t post_id,
                                             std::string_view marker, CoercionMode mode) {
  const std::string coerced = coerced_id(post_id, kCoercionSuffix);
  InjectionRequestSpec spec;
  spec.url = single_post_url(endpoint_url, post_id);
  spec.url += spec.url.find('?') == std::string::npos ? "?id=" : "&id=";
  spec.url += coerced;
  if (mode == CoercionMode::active) {
    spec.method = HttpMethod::POST;
    nlohmann::ordered_json body;
    body["id"] = coerced;
    body["title"] = std::string(marker);
    body["content"] = std::string(marker);
    spec.body = body.dump();
    spec.content_type = "application/json";
  }
  return spec;
}

std::string random_marker() {
  static constexpr char kHex[] = "0123456789abcdef";
  std::random_device rd;
  std::uniform_int_distribution<int> nibble(0, 15);
  std::string marker = "wpcis-marker-";
  for (int i = 0; i < 8; ++i) marker += kHex[nibble(rd)];
  return marker;
}

CoercionOutcome coercion_check(std::string_view endpoint_url, std::int64_t post_id,
                               CoercionMode mode, const std::optional<std::string>& consent,
                               HttpClient& http, std::string_view marker) {
  if (mode == CoercionMode::off) {
    throw Error(ErrorCode::InvalidArgument, "coercion check requested with mode off");
  }
  if (mode == CoercionMode::active && !has_valid_consent(consent)) {
    throw Error(ErrorCode::ConsentRequired,
                "active coercion check requires --consent " + std::string(kConsentToken));
  }

  const std::string active_marker =
      mode == CoercionMode::active && marker.empty() ? random_marker() : std::string(marker);
  const InjectionRequestSpec spec = build_injection_request(endpoint_url, post_id, active_marker, mode);

  CoercionOutcome outcome;
  outcome.mode = mode;
  outcome.request_url = spec.url;
  outcome.request_body = spec.body;

  const HttpResponse response = spec.method == HttpMethod::POST
                                    ? http.post(spec.url, kJsonAccept, *spec.body, *spec.content_type)
                                    : http.get(spec.url, kJsonAccept);
  outcome.response_status = response.status;
  outcome.response_excerpt = response.body.substr(0, kExcerptBytes);
  const json doc = json::parse(response.body, nullptr, false);

  if (mode == CoercionMode::passive) {
    if (response.status == 200 && doc.is_object() && doc.contains("id") &&
        doc["id"].is_number_integer() && doc["id"].get<std::int64_t>() == post_id) {
      outcome.result = CoercionResult::Confirmed;
    } else if (response.status == 404 || is_rest_error(doc)) {
      outcome.result = CoercionResult::Refuted;
    } else {
      outcome.result = CoercionResult::Inconclusive;
    }
    return outcome;
  }

  if (response.status == 401 || response.status == 403 || response.status == 404) {
    outcome.result = CoercionResult::Refuted;
  } else if (response.status == 200) {
    const HttpResponse check = http.get(single_post_url(endpoint_url, post_id), kJsonAccept);
    const json post = json::parse(check.body, nullptr, false);
    outcome.result = check.status == 200 &&
                             rendered_content(post).find(active_marker) != std::string::npos
                         ? CoercionResult::Confirmed
                         : CoercionResult::Inconclusive;
  } else {
    outcome.result = CoercionResult::Inconclusive;
  }
  return outcome;
}

Verdict detect(const TargetUrl& target, const DetectOptions& options, HttpClient& http) {
  if (options.coercion == CoercionMode::active && !has_valid_consent(options.consent_token)) {
    throw Error(ErrorCode::ConsentRequired,
                "active coercion check requires --consent " + std::string(kConsentToken));
  }

  // Step 1: is it WordPress, and which release?
  FingerprintResult fp;
  try {
    fp = fingerprint(target, http);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AllProbesFailed) throw;
    return indeterminate(std::nullopt, e.what());
  }
  if (!fp.is_wordpress) return not_vulnerable(std::nullopt, std::string(kReasonNotWordPress));
  if (!fp.version) return not_vulnerable(std::nullopt, not_found("WordPress version not disclosed"));

  const WpVersion version = *fp.version;
  const bool exact = is_affected_version(version);
  const bool imprecise = is_imprecise_affected_candidate(version);
  if (!exact && !imprecise) {
    return not_vulnerable(version, not_found("version " + version.str() + " is not affected"));
  }

  // Step 2: is the posts endpoint reachable?
  ProbeResult probe;
  try {
    probe = probe_posts_endpoint(target, http);
  } catch (const TransportError& e) {
    return indeterminate(version, e.what());
  }
  if (!probe.endpoint_present()) {
    if (probe.http_status >= 500) {
      return indeterminate(version, "posts endpoint answered HTTP " + std::to_string(probe.http_status));
    }
    return not_vulnerable(version, not_found("posts endpoint not available (HTTP " +
                                             std::to_string(probe.http_status) + ")"));
  }

  Verdict verdict;
  verdict.version = version;

  // Step 3: report, optionally after confirming the id coercion.
  if (options.coercion == CoercionMode::off) {
    verdict.kind = VerdictKind::Vulnerable;
    verdict.vulnerable_url = probe.endpoint_url;
    verdict.reason = imprecise ? "affected release line and posts endpoint present"
                               : "affected version and posts endpoint present";
    return verdict;
  }

  if (probe.posts.empty()) {
    if (imprecise) {
      return indeterminate(version, "no post disclosed to run the id coercion check against");
    }
    verdict.kind = VerdictKind::Vulnerable;
    verdict.vulnerable_url = probe.endpoint_url;
    verdict.reason = "affected version and posts endpoint present; no post to run the id coercion check";
    return verdict;
  }

  CoercionOutcome outcome;
  try {
    outcome = coercion_check(probe.endpoint_url, probe.posts.front().id, options.coercion,
                             options.consent_token, http, options.marker);
  } catch (const TransportError& e) {
    outcome.mode = options.coercion;
    outcome.result = CoercionResult::Inconclusive;
    outcome.request_url = build_injection_request(probe.endpoint_url, probe.posts.front().id,
                                                  options.marker, CoercionMode::passive)
                              .url;
    verdict.kind = VerdictKind::Indeterminate;
    verdict.reason = e.what();
    verdict.coercion = std::move(outcome);
    return verdict;
  }

  switch (outcome.result) {
    case CoercionResult::Confirmed:
      verdict.kind = VerdictKind::Vulnerable;
      verdict.vulnerable_url = probe.endpoint_url;
      verdict.reason = "alphanumeric post id accepted by the posts endpoint";
      break;
    case CoercionResult::Refuted:
      verdict.kind = VerdictKind::NotVulnerable;
      verdict.reason = not_found("alphanumeric post id rejected (HTTP " +
                                 std::to_string(outcome.response_status) + ")");
      break;
    case CoercionResult::Inconclusive:
      verdict.kind = VerdictKind::Indeterminate;
      verdict.reason = "id coercion check inconclusive (HTTP " +
                       std::to_string(outcome.response_status) + ")";
      break;
  }
  verdict.coercion = std::move(outcome);
  return verdict;
}

std::string render_verdict(const Verdict& verdict) {
  switch (verdict.kind) {
    case VerdictKind::Vulnerable:
      return "[+] This site is vulnerable\n[+] Version: " +
             (verdict.version ? verdict.version->str() : std::string("unknown")) +
             "\n[+] Here is the vulnerable parameter: " + verdict.vulnerable_url.value_or("") + "\n";
    case VerdictKind::NotVulnerable:
      return "[!] Website is Not Vulnerable to Wordpress content injection vulnerability\n";
    case VerdictKind::Indeterminate:
      return "[?] Scan inconclusive: " + verdict.reason + "\n";
  }
  return {};
}

}  // namespace wpcis

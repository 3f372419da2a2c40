#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "wpcis/http_client.hpp"
#include "wpcis/scan_options.hpp"
#include "wpcis/target.hpp"
#include "wpcis/version.hpp"

namespace wpcis {

enum class VerdictKind { Vulnerable, NotVulnerable, Indeterminate };
enum class CoercionResult { Confirmed, Refuted, Inconclusive };
enum class HttpMethod { GET, POST };

std::string_view to_string(VerdictKind kind) noexcept;
std::string_view to_string(CoercionResult result) noexcept;
std::string_view to_string(HttpMethod method) noexcept;

/// Suffix appended to a disclosed post id to exercise the id coercion.
inline constexpr std::string_view kCoercionSuffix = "wpcisX";

// Verdict.reason texts.
inline constexpr std::string_view kReasonNotFound =
    "WordPress Content Injection vulnerability not found";
inline constexpr std::string_view kReasonNotWordPress = "not WordPress";

struct CoercionOutcome {
  CoercionMode mode = CoercionMode::passive;
  CoercionResult result = CoercionResult::Inconclusive;
  std::string request_url;
  std::optional<std::string> request_body;
  int response_status = 0;
  std::string response_excerpt;  // at most 512 bytes
};

struct Verdict {
  VerdictKind kind = VerdictKind::Indeterminate;
  std::optional<WpVersion> version;
  std::optional<std::string> vulnerable_url;
  std::string reason;
  std::optional<CoercionOutcome> coercion;
};

struct InjectionRequestSpec {
  HttpMethod method = HttpMethod::GET;
  std::string url;
  std::optional<std::string> body;
  std::optional<std::string> content_type;
};

struct DetectOptions {
  CoercionMode coercion = CoercionMode::passive;
  std::optional<std::string> consent_token;
  // Active-mode marker; a random "wpcis-marker-XXXXXXXX" when empty.
  std::string marker;
};

/// "{endpoint}/{post_id}?id={post_id}wpcisX" (or "&id=" when the endpoint
/// already has a query). Active mode adds a JSON body with exactly the keys
/// id, title and content.
InjectionRequestSpec build_injection_request(std::string_view endpoint_url,
                                             std::int64_t post_id,
                                             std::string_view marker,
                                             CoercionMode mode);

/// Sends the coercion request and classifies the answer. Active mode throws
/// Error(ConsentRequired) before any traffic unless `consent` is the CLI
/// consent literal. Transport failures propagate as TransportError.
CoercionOutcome coercion_check(std::string_view endpoint_url, std::int64_t post_id,
                               CoercionMode mode,
                               const std::optional<std::string>& consent,
                               HttpClient& http, std::string_view marker = {});

std::string random_marker();

/// Fingerprint, probe for the posts endpoint, then optionally confirm through
/// id coercion. Transport failures on a mandatory step give Indeterminate.
/// Throws Error(ConsentRequired) for active mode without consent.
Verdict detect(const TargetUrl& target, const DetectOptions& options, HttpClient& http);

/// Operator-facing verdict lines, byte-exact.
std::string render_verdict(const Verdict& verdict);

}  // namespace wpcis

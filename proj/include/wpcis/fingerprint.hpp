#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wpcis/http_client.hpp"
#include "wpcis/target.hpp"
#include "wpcis/version.hpp"

namespace wpcis {

enum class EvidenceSource {
  meta_generator,
  feed_generator,
  readme_page,
  asset_query_version,
  rest_header,
};

std::string_view to_string(EvidenceSource source) noexcept;

/// Trust rank, lower is more trusted: readme_page, asset_query_version,
/// feed_generator, meta_generator, rest_header.
int evidence_priority(EvidenceSource source) noexcept;

struct FingerprintEvidence {
  EvidenceSource source = EvidenceSource::rest_header;
  std::string raw_text;
  std::optional<WpVersion> parsed_version;
  int priority = 0;

  friend bool operator==(const FingerprintEvidence&, const FingerprintEvidence&) = default;
};

FingerprintEvidence make_evidence(EvidenceSource source, std::string raw_text);

struct FetchError {
  std::string url;
  TransportErrorKind kind = TransportErrorKind::other;
};

struct FingerprintResult {
  bool is_wordpress = false;
  std::optional<WpVersion> version;
  std::vector<FingerprintEvidence> evidence;
  std::vector<FetchError> fetch_errors;
};

/// Version of the most trusted evidence that carries one. Ties within a
/// priority prefer patch precision, then the higher version, so the result
/// does not depend on collection order.
std::optional<WpVersion> resolve_version(std::span<const FingerprintEvidence> evidence);

// Per-surface extractors. Each returns nothing when the surface does not look
// like WordPress.
namespace extract {

std::optional<FingerprintEvidence> meta_generator(std::string_view html);
std::optional<FingerprintEvidence> feed_generator(std::string_view xml);
std::optional<FingerprintEvidence> readme_page(std::string_view html);
std::vector<FingerprintEvidence> asset_versions(std::string_view html);
std::optional<FingerprintEvidence> rest_index(const HttpResponse& response);

}  // namespace extract

/// Collects WordPress evidence from the homepage, feed, readme, core asset
/// URLs and the REST index, strictly in that order. Individual transport
/// failures are recorded in fetch_errors. Throws Error(AllProbesFailed) when
/// no fetch produced an HTTP response.
FingerprintResult fingerprint(const TargetUrl& target, HttpClient& http);

}  // namespace wpcis

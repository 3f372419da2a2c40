#include <doctest.h>

#include <algorithm>
#include <climits>
#include <random>
#include <set>
#include <regex>

#include "support.hpp"
#include "wpcis/fingerprint.hpp"
#include "wpcis/mock_server.hpp"

using namespace wpcis;
using wpcis::testing::FakeHttpClient;

namespace {

// Leftmost start, then longest, over every substring that is a dotted run of
// 2-3 numbers bounded by non-digits and whose components fit in unsigned.
std::optional<WpVersion> reference_find_version(const std::string& s) {
  static const std::regex shape(R"(\d+(\.\d+){1,2})");
  const auto digit = [&](std::size_t k) { return std::isdigit(static_cast<unsigned char>(s[k])) != 0; };
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0 && digit(i - 1)) continue;
    std::optional<WpVersion> best;
    for (std::size_t j = i + 1; j <= s.size(); ++j) {
      if (j < s.size() && digit(j)) continue;
      const std::string sub = s.substr(i, j - i);
      if (!std::regex_match(sub, shape)) continue;
      std::vector<unsigned long long> parts;
      std::size_t start = 0;
      bool fits = true;
      while (start <= sub.size()) {
        const auto dot = sub.find('.', start);
        const std::string num = sub.substr(start, dot - start);
        if (num.size() > 10 || std::stoull(num) > UINT_MAX) fits = false;
        if (fits) parts.push_back(std::stoull(num));
        if (dot == std::string::npos) break;
        start = dot + 1;
      }
      if (!fits) continue;
      WpVersion v{static_cast<unsigned>(parts[0]), static_cast<unsigned>(parts[1]), std::nullopt};
      if (parts.size() == 3) v.patch = static_cast<unsigned>(parts[2]);
      best = v;  // later j is longer
    }
    if (best) return best;
  }
  return std::nullopt;
}

std::string homepage_with(const std::string& meta, const std::string& asset_ver) {
  std::string html = "<html><head>";
  if (!meta.empty()) html += "<meta name=\"generator\" content=\"WordPress " + meta + "\" />";
  if (!asset_ver.empty()) {
    html += "<script src='http://t.test/wp-includes/js/wp-embed.min.js?ver=" + asset_ver + "'></script>";
  }
  return html + "</head></html>";
}

}  // namespace

TEST_SUITE("fingerprint") {

TEST_CASE("normalize_target examples") {
  CHECK(normalize_target("http://localhost/wp/wordpress4.7.0") ==
        TargetUrl{Scheme::http, "localhost", 80, "/wp/wordpress4.7.0"});
  CHECK(normalize_target("www.themexpert.com") == TargetUrl{Scheme::http, "www.themexpert.com", 80, ""});
  CHECK(normalize_target("https://Example.TEST///") == TargetUrl{Scheme::https, "example.test", 443, ""});
  CHECK(normalize_target("  HTTP://127.0.0.1:8080/site/a/ ") ==
        TargetUrl{Scheme::http, "127.0.0.1", 8080, "/site/a"});
  CHECK(normalize_target("http://[::1]:9000/x").str() == "http://[::1]:9000/x");
  CHECK(normalize_target("https://example.test:443/").str() == "https://example.test");
}

TEST_CASE("normalize_target rejects malformed input") {
  for (const char* bad : {"", "   ", "ftp://example.test", "http://", "http://:80/", "http://host:0",
                          "http://host:70000", "http://host:8x", "http://a b", "http://h/?q=1",
                          "http://user@host/", "http://ho$t/", "http://[zz]/"}) {
    CAPTURE(bad);
    try {
      (void)normalize_target(bad);
      FAIL("expected MalformedUrl");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MalformedUrl);
    }
  }
}

TEST_CASE("normalize_target is idempotent and case-folds the host") {
  std::mt19937 rng(7);
  const std::vector<std::string> hosts = {"Example.TEST", "localhost", "WWW.Site.Org", "10.0.0.7"};
  const std::vector<std::string> paths = {"", "/", "///", "/wp", "/WP/Blog/", "/a/b//", "/x.y"};
  const std::vector<std::string> schemes = {"", "http://", "HTTPS://", "https://"};
  for (int i = 0; i < 500; ++i) {
    const std::string host = hosts[rng() % hosts.size()];
    std::string upper_host = host;
    std::transform(upper_host.begin(), upper_host.end(), upper_host.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    std::string tail;
    if (rng() % 3 == 0) tail += ":" + std::to_string(1 + rng() % 65535);
    tail += paths[rng() % paths.size()];
    const std::string scheme = schemes[rng() % schemes.size()];
    const std::string raw = scheme + host + tail;
    CAPTURE(raw);
    const TargetUrl once = normalize_target(raw);
    CHECK(normalize_target(once.str()) == once);
    CHECK(std::none_of(once.host.begin(), once.host.end(),
                       [](char c) { return std::isupper(static_cast<unsigned char>(c)); }));
    CHECK((once.base_path.empty() || once.base_path.back() != '/'));
    CHECK(normalize_target(scheme + upper_host + tail) == once);
  }
}

TEST_CASE("parse_version examples") {
  CHECK(parse_version("WordPress 4.7.0") == WpVersion{4, 7, 0});
  CHECK(parse_version("WordPress 4.7") == WpVersion{4, 7, std::nullopt});
  CHECK(parse_version("generator=WordPress 4.7.1; misc") == WpVersion{4, 7, 1});
  CHECK(parse_version("?ver=4.7.1") == WpVersion{4, 7, 1});
  CHECK(parse_version("v 1.2.3.4") == WpVersion{1, 2, 3});
  CHECK(reference_find_version("generator=WordPress 4.7.1; misc") == WpVersion{4, 7, 1});
  CHECK_THROWS_AS(parse_version("WordPress"), Error);
  try {
    (void)parse_version("version 4 only");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoVersionFound);
  }
}

TEST_CASE("find_version agrees with the brute-force substring extractor") {
  std::mt19937 rng(42);
  const std::string alphabet = "0123456789....aWv =;";
  for (int i = 0; i < 20000; ++i) {
    std::string s;
    const int len = static_cast<int>(rng() % 16);
    for (int k = 0; k < len; ++k) s += alphabet[rng() % alphabet.size()];
    if (rng() % 50 == 0) s += ".12345678901";
    CAPTURE(s);
    CHECK(find_version(s) == reference_find_version(s));
  }
}

TEST_CASE("is_affected_version over the version grid") {
  for (unsigned major = 0; major <= 9; ++major) {
    for (unsigned minor = 0; minor <= 20; ++minor) {
      CHECK_FALSE(is_affected_version(WpVersion{major, minor, std::nullopt}));
      for (unsigned patch = 0; patch <= 9; ++patch) {
        const bool expected = major == 4 && minor == 7 && (patch == 0 || patch == 1);
        CHECK(is_affected_version(WpVersion{major, minor, patch}) == expected);
      }
    }
  }
  CHECK(is_imprecise_affected_candidate(WpVersion{4, 7, std::nullopt}));
  CHECK_FALSE(is_imprecise_affected_candidate(WpVersion{4, 7, 0}));
}

TEST_CASE("evidence priority order") {
  CHECK(evidence_priority(EvidenceSource::readme_page) < evidence_priority(EvidenceSource::asset_query_version));
  CHECK(evidence_priority(EvidenceSource::asset_query_version) < evidence_priority(EvidenceSource::feed_generator));
  CHECK(evidence_priority(EvidenceSource::feed_generator) < evidence_priority(EvidenceSource::meta_generator));
  CHECK(evidence_priority(EvidenceSource::meta_generator) < evidence_priority(EvidenceSource::rest_header));
}

TEST_CASE("extractors") {
  SUBCASE("meta generator, either attribute order") {
    auto e = extract::meta_generator("<meta name=\"generator\" content=\"WordPress 4.7.0\" />");
    REQUIRE(e);
    CHECK(e->raw_text == "WordPress 4.7.0");
    CHECK(e->parsed_version == WpVersion{4, 7, 0});
    e = extract::meta_generator("<META content='WordPress 4.7' NAME='Generator'>");
    REQUIRE(e);
    CHECK(e->parsed_version == WpVersion{4, 7, std::nullopt});
    CHECK_FALSE(extract::meta_generator("<meta name=\"generator\" content=\"Hugo 0.92.0\">"));
    CHECK_FALSE(extract::meta_generator("<meta name=\"generators\" content=\"WordPress 4.7\">"));
  }
  SUBCASE("feed generator") {
    auto e = extract::feed_generator("<rss><generator>https://wordpress.org/?v=4.7.1</generator></rss>");
    REQUIRE(e);
    CHECK(e->parsed_version == WpVersion{4, 7, 1});
    CHECK_FALSE(extract::feed_generator("<generator>Jekyll 3.8</generator>"));
  }
  SUBCASE("readme") {
    auto e = extract::readme_page("<h1>WordPress<br /> Version 4.7.1</h1>");
    REQUIRE(e);
    CHECK(e->raw_text == "Version 4.7.1");
    CHECK_FALSE(extract::readme_page("<h1>Some CMS Version 1.2</h1>"));
  }
  SUBCASE("core asset versions only") {
    const auto found = extract::asset_versions(
        "<link href='/wp-content/themes/x/style.css?ver=1.1'>"
        "<script src=\"/wp-includes/js/a.js?ver=4.7.1\"></script>"
        "<script src=\"/wp-includes/js/b.js?x=1&ver=4.7.1\"></script>"
        "<link href='/wp-admin/css/c.css?ver=4.7'>");
    REQUIRE(found.size() == 2);
    CHECK(found[0].raw_text == "ver=4.7.1");
    CHECK(found[1].parsed_version == WpVersion{4, 7, std::nullopt});
  }
  SUBCASE("rest index") {
    HttpResponse link{200, {{"link", "<http://t/wp-json/>; rel=\"https://api.w.org/\""}}, "{}"};
    auto e = extract::rest_index(link);
    REQUIRE(e);
    CHECK_FALSE(e->parsed_version);
    HttpResponse body{200, {}, R"({"namespaces":["oembed/1.0","wp/v2"]})"};
    CHECK(extract::rest_index(body));
    HttpResponse missing{404, {}, R"({"code":"rest_no_route"})"};
    CHECK_FALSE(extract::rest_index(missing));
  }
  SUBCASE("parsed version re-derives from raw text") {
    for (const auto& e : {extract::meta_generator("<meta name=generator content='x'>"),
                          extract::feed_generator("<generator>https://wordpress.org/?v=4.7</generator>")}) {
      if (e && e->parsed_version) CHECK(find_version(e->raw_text) == e->parsed_version);
    }
  }
}

TEST_CASE("priority resolution over every pair of version-bearing sources") {
  const std::vector<EvidenceSource> sources = {EvidenceSource::readme_page, EvidenceSource::asset_query_version,
                                               EvidenceSource::feed_generator, EvidenceSource::meta_generator};
  const std::string base = "http://t.test";
  for (const auto a : sources) {
    for (const auto b : sources) {
      if (a == b) continue;
      CAPTURE(to_string(a));
      CAPTURE(to_string(b));
      std::map<EvidenceSource, std::string> versions = {{a, "4.7.0"}, {b, "4.7.1"}};
      auto ver = [&](EvidenceSource s) { return versions.contains(s) ? versions[s] : std::string(); };
      FakeHttpClient http;
      http.set(base + "/", 200, homepage_with(ver(EvidenceSource::meta_generator), ver(EvidenceSource::asset_query_version)));
      if (!ver(EvidenceSource::feed_generator).empty()) {
        http.set(base + "/feed/", 200, "<generator>https://wordpress.org/?v=" + ver(EvidenceSource::feed_generator) + "</generator>");
      }
      if (!ver(EvidenceSource::readme_page).empty()) {
        http.set(base + "/readme.html", 200, "WordPress <br /> Version " + ver(EvidenceSource::readme_page));
      }
      const auto result = fingerprint(normalize_target(base), http);
      const auto winner = evidence_priority(a) < evidence_priority(b) ? a : b;
      CHECK(result.is_wordpress);
      CHECK(result.version == parse_version(versions[winner]));
      CHECK(result.evidence.size() == 2);
    }
  }
}

TEST_CASE("meta 4.7 with asset ?ver=4.7.1 resolves to 4.7.1") {
  FakeHttpClient http;
  http.set("http://t.test/", 200, homepage_with("4.7", "4.7.1"));
  const auto result = fingerprint(normalize_target("t.test"), http);
  CHECK(result.version == WpVersion{4, 7, 1});
}

TEST_CASE("resolve_version ignores collection order") {
  std::mt19937 rng(3);
  const std::vector<std::string> raws = {"4.7", "4.7.0", "4.7.1", "4.7.2", "4.6"};
  const std::vector<EvidenceSource> sources = {EvidenceSource::readme_page, EvidenceSource::asset_query_version,
                                               EvidenceSource::feed_generator, EvidenceSource::meta_generator,
                                               EvidenceSource::rest_header};
  for (int round = 0; round < 200; ++round) {
    std::vector<FingerprintEvidence> evidence;
    const int n = 1 + static_cast<int>(rng() % 5);
    for (int k = 0; k < n; ++k) {
      evidence.push_back(make_evidence(sources[rng() % sources.size()], "ver=" + raws[rng() % raws.size()]));
    }
    const auto expected = resolve_version(evidence);
    std::sort(evidence.begin(), evidence.end(), [](const auto& x, const auto& y) {
      return std::tie(x.priority, x.raw_text) < std::tie(y.priority, y.raw_text);
    });
    do {
      CHECK(resolve_version(evidence) == expected);
    } while (std::next_permutation(evidence.begin(), evidence.end(), [](const auto& x, const auto& y) {
      return std::tie(x.priority, x.raw_text) < std::tie(y.priority, y.raw_text);
    }));
  }
}

TEST_CASE("fingerprint records transport failures and keeps probing") {
  FakeHttpClient http;
  http.fail("http://t.test/feed/", TransportErrorKind::timeout);
  http.set("http://t.test/readme.html", 200, "WordPress <br /> Version 4.7.1");
  const auto result = fingerprint(normalize_target("t.test"), http);
  REQUIRE(result.fetch_errors.size() == 1);
  CHECK(result.fetch_errors[0].url == "http://t.test/feed/");
  CHECK(result.fetch_errors[0].kind == TransportErrorKind::timeout);
  CHECK(result.version == WpVersion{4, 7, 1});
  CHECK(http.requested == std::vector<std::string>{"GET http://t.test/", "GET http://t.test/feed/",
                                                   "GET http://t.test/readme.html", "GET http://t.test/wp-json/"});
}

TEST_CASE("fingerprint throws AllProbesFailed when nothing answers") {
  FakeHttpClient http;
  http.fail_all();
  try {
    (void)fingerprint(normalize_target("t.test"), http);
    FAIL("expected AllProbesFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllProbesFailed);
  }
}

TEST_CASE("fingerprint never reports a version without WordPress") {
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    FakeHttpClient http;
    if (rng() % 2) http.set("http://t.test/", 200, homepage_with(rng() % 2 ? "4.7" : "", rng() % 2 ? "4.7.1" : ""));
    if (rng() % 2) http.set("http://t.test/feed/", 200, "<generator>https://wordpress.org/?v=4.7.2</generator>");
    if (rng() % 2) http.set("http://t.test/wp-json/", 200, R"({"namespaces":["wp/v2"]})");
    const auto r = fingerprint(normalize_target("t.test"), http);
    if (r.version) CHECK(r.is_wordpress);
    CHECK(r.is_wordpress == !r.evidence.empty());
  }
}

TEST_CASE("fingerprint against the mock target") {
  using namespace wpcis::mock;
  MockServer server({testing::site("wp470", "WordPress 4.7.0", SiteBehavior::vulnerable),
                     testing::site("plain", "", SiteBehavior::not_wordpress)});
  server.start("127.0.0.1", 0);
  auto http = testing::local_client();

  const auto wp = fingerprint(normalize_target(server.base_url("wp470")), http);
  CHECK(wp.is_wordpress);
  CHECK(wp.version == WpVersion{4, 7, 0});
  CHECK(wp.fetch_errors.empty());
  std::set<EvidenceSource> seen;
  for (const auto& e : wp.evidence) {
    seen.insert(e.source);
    if (e.parsed_version) CHECK(*e.parsed_version == WpVersion{4, 7, 0});
  }
  CHECK(seen.size() == 5);

  const auto other = fingerprint(normalize_target(server.base_url("plain")), http);
  CHECK_FALSE(other.is_wordpress);
  CHECK_FALSE(other.version);
}

}  // TEST_SUITE

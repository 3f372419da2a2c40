#include <doctest.h>

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <thread>

#include "fleet_fixture.hpp"
#include "support.hpp"
#include "wpcis/batch.hpp"

using namespace wpcis;

namespace {

// Answers 404 to everything after a short pause, recording how many
// requests are in flight per host at once.
struct InFlightProbe {
  std::mutex mu;
  std::map<std::string, int> current;
  std::map<std::string, int> peak;
  int global_current = 0;
  int global_peak = 0;
};

class SlowClient final : public HttpClient {
 public:
  explicit SlowClient(InFlightProbe& probe) : probe_(probe) {}

  HttpResponse get(const std::string& url, const Headers&) override { return visit(url); }
  HttpResponse post(const std::string& url, const Headers&, const std::string&, const std::string&) override {
    return visit(url);
  }

 private:
  HttpResponse visit(const std::string& url) {
    const std::string host = split_url(url)->origin();
    {
      std::lock_guard lock(probe_.mu);
      probe_.peak[host] = std::max(probe_.peak[host], ++probe_.current[host]);
      probe_.global_peak = std::max(probe_.global_peak, ++probe_.global_current);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(3));
    {
      std::lock_guard lock(probe_.mu);
      --probe_.current[host];
      --probe_.global_current;
    }
    HttpResponse r;
    r.status = 404;
    return r;
  }

  InFlightProbe& probe_;
};

}  // namespace

TEST_SUITE("batch") {

TEST_CASE("per-host politeness and overall concurrency") {
  std::vector<BatchTarget> targets;
  for (int h = 0; h < 4; ++h) {
    for (int i = 0; i < 6; ++i) {
      targets.push_back({normalize_target("http://host" + std::to_string(h) + ".test/s" + std::to_string(i)),
                         Sector::unknown, std::nullopt});
    }
  }
  InFlightProbe probe;
  ScanOptions options;
  options.concurrency = 8;
  const auto records = scan_batch(targets, options, [&] { return std::make_unique<SlowClient>(probe); });
  REQUIRE(records.size() == targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    CHECK(records[i].target == targets[i].target);
    CHECK(records[i].verdict.kind == VerdictKind::NotVulnerable);
  }
  for (const auto& [host, peak] : probe.peak) {
    CAPTURE(host);
    CHECK(peak <= 2);
  }
  CHECK(probe.global_peak > 2);
}

TEST_CASE("records come back in input order with their labels") {
  auto fleet = testing::reference_fleet();
  fleet.sites.resize(24);
  mock::MockServer server(fleet.sites);
  server.start("127.0.0.1", 0);

  std::vector<BatchTarget> targets;
  for (std::size_t i = 0; i < fleet.sites.size(); ++i) {
    targets.push_back({normalize_target(server.base_url(fleet.sites[i].site_id)), fleet.sites[i].sector,
                       fleet.manual_labels[i]});
  }
  ScanOptions options;
  options.concurrency = 6;
  options.timeout_ms = 3000;
  const auto records = scan_batch(targets, options, network_client_factory(options));
  REQUIRE(records.size() == targets.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CAPTURE(fleet.sites[i].site_id);
    CHECK(records[i].target == targets[i].target);
    CHECK(records[i].sector == targets[i].sector);
    CHECK(records[i].manual_label == targets[i].manual_label);
    CHECK((records[i].verdict.kind == VerdictKind::Vulnerable) == static_cast<bool>(fleet.vulnerable[i]));
  }
}

TEST_CASE("active mode without consent is refused before any traffic") {
  InFlightProbe probe;
  const std::vector<BatchTarget> targets = {{normalize_target("a.test"), Sector::unknown, std::nullopt}};
  ScanOptions options;
  options.coercion_mode = CoercionMode::active;
  try {
    (void)scan_batch(targets, options, [&] { return std::make_unique<SlowClient>(probe); });
    FAIL("expected ConsentRequired");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConsentRequired);
  }
  CHECK(probe.peak.empty());
}

}  // TEST_SUITE

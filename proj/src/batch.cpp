#include "wpcis/batch.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

#include "wpcis/detector.hpp"

namespace wpcis {

std::vector<ScanRecord> scan_batch(std::span<const BatchTarget> targets, const ScanOptions& options,
                                   const ClientFactory& make_client, std::size_t per_host_limit) {
  DetectOptions detect_options;
  detect_options.coercion = options.coercion_mode;
  detect_options.consent_token = options.consent_token;
  if (detect_options.coercion == CoercionMode::active && !has_valid_consent(options.consent_token)) {
    throw Error(ErrorCode::ConsentRequired,
                "active coercion check requires --consent " + std::string(kConsentToken));
  }

  std::vector<ScanRecord> records(targets.size());
  HostLimiter limiter(per_host_limit);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    auto client = make_client();
    PoliteClient polite(*client, limiter);
    for (std::size_t i = next++; i < targets.size(); i = next++) {
      const BatchTarget& t = targets[i];
      const auto started = std::chrono::steady_clock::now();
      Verdict verdict;
      try {
        verdict = detect(t.target, detect_options, polite);
      } catch (const std::exception& e) {
        verdict.kind = VerdictKind::Indeterminate;
        verdict.reason = e.what();
      }
      const auto elapsed = std::chrono::steady_clock::now() - started;
      records[i] = ScanRecord{t.target, std::move(verdict), t.sector, t.manual_label,
                              std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()};
    }
  };

  const auto workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(options.concurrency, 1)),
                                               1, std::max<std::size_t>(targets.size(), 1));
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return records;
}

ClientFactory network_client_factory(const ScanOptions& options) {
  HttpClientConfig config;
  config.timeout = std::chrono::milliseconds(options.timeout_ms);
  return [config] { return std::make_unique<NetworkClient>(config); };
}

}  // namespace wpcis

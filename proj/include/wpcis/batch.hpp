#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "wpcis/http_client.hpp"
#include "wpcis/report.hpp"
#include "wpcis/scan_options.hpp"
#include "wpcis/target.hpp"

namespace wpcis {

using ClientFactory = std::function<std::unique_ptr<HttpClient>()>;

struct BatchTarget {
  TargetUrl target;
  Sector sector = Sector::unknown;
  std::optional<ManualLabel> manual_label;
};

/// Scans every target on a pool of options.concurrency workers, each with
/// its own client from `make_client`, all sharing one per-host limiter.
/// Records come back in input order.
std::vector<ScanRecord> scan_batch(std::span<const BatchTarget> targets,
                                   const ScanOptions& options,
                                   const ClientFactory& make_client,
                                   std::size_t per_host_limit = 2);

ClientFactory network_client_factory(const ScanOptions& options);

}  // namespace wpcis

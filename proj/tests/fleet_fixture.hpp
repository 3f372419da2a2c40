#pragma once

#include <string>
#include <vector>

#include "wpcis/mock_server.hpp"
#include "wpcis/report.hpp"

namespace wpcis::testing {

/// 176-site fleet with a fixed ground truth: 59 vulnerable (35 on 4.7.0, 24 on 4.7.1; 30 education, 15 blog,
/// 9 online_portal, 5 medical, 0 financial) and 117 non-vulnerable sites
/// split across patched, routes_disabled and not_wordpress.
struct FleetFixture {
  std::vector<mock::MockSiteSpec> sites;
  std::vector<bool> vulnerable;            // ground truth, parallel to sites
  std::vector<ManualLabel> manual_labels;  // 162 of 176 agree with truth
};

FleetFixture reference_fleet();

std::string url_list(const FleetFixture& fleet, const mock::MockServer& server);
std::string labels_csv(const FleetFixture& fleet, const mock::MockServer& server);

}  // namespace wpcis::testing

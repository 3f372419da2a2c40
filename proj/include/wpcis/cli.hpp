#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wpcis/scan_options.hpp"

namespace wpcis::cli {

inline constexpr int kExitNotVulnerable = 0;
inline constexpr int kExitVulnerable = 1;
inline constexpr int kExitIndeterminate = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitUnavailable = 69;

/// Banner printed ahead of a single-target verdict.
std::string banner();

int cmd_scan(const std::string& url, const ScanOptions& options, std::ostream& out,
             std::ostream& err);
int cmd_scan_file(const std::string& path, const std::string* labels_path,
                  const ScanOptions& options, std::ostream& out, std::ostream& err);
int cmd_mock_serve(const std::string& fleet_path, const std::string& bind, bool host_routing,
                   std::ostream& out, std::ostream& err);
int cmd_report(const std::string& in_path, OutputFormat format,
               const std::string* output_path, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace wpcis::cli

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wpcis/detector.hpp"
#include "wpcis/scan_options.hpp"
#include "wpcis/sector.hpp"
#include "wpcis/target.hpp"
#include "wpcis/version.hpp"

namespace wpcis {

enum class ManualLabel { vulnerable, not_vulnerable };

std::string_view to_string(ManualLabel label) noexcept;
std::optional<ManualLabel> parse_manual_label(std::string_view text) noexcept;

struct ScanRecord {
  TargetUrl target;
  Verdict verdict;
  Sector sector = Sector::unknown;
  std::optional<ManualLabel> manual_label;
  std::int64_t duration_ms = 0;
};

struct Share {
  std::int64_t count = 0;
  int percent = 0;

  friend bool operator==(const Share&, const Share&) = default;
};

struct AggregateReport {
  std::int64_t total = 0;
  std::int64_t vulnerable = 0;
  std::int64_t not_vulnerable = 0;
  std::int64_t indeterminate = 0;
  int vulnerable_pct = 0;
  std::map<WpVersion, Share> version_split;
  std::map<Sector, Share> sector_split;
  std::optional<int> accuracy_pct;

  friend bool operator==(const AggregateReport&, const AggregateReport&) = default;
};

/// round_half_up(100 * part / whole); 0 when whole is 0.
int percent_of(std::int64_t part, std::int64_t whole) noexcept;

/// Throws Error(EmptyInput).
AggregateReport aggregate(std::span<const ScanRecord> records);

/// Share of records whose verdict agrees with the manual label. Indeterminate
/// never agrees. Throws Error(MissingLabels) listing unlabeled targets, or
/// Error(EmptyInput).
int accuracy(std::span<const ScanRecord> records);

/// Per-target line of the JSON report.
struct ReportEntry {
  std::string url;
  VerdictKind verdict = VerdictKind::Indeterminate;
  std::optional<WpVersion> version;
  std::optional<std::string> vulnerable_url;
  Sector sector = Sector::unknown;
  std::int64_t duration_ms = 0;
};

struct ReportDocument {
  AggregateReport aggregate;
  std::vector<ReportEntry> records;
};

ReportDocument make_document(std::span<const ScanRecord> records);

std::string emit(const ReportDocument& document, OutputFormat format);

/// Reads a document previously written by emit(..., json).
/// Throws Error(ConfigParseError).
ReportDocument parse_report_json(std::string_view text);

}  // namespace wpcis

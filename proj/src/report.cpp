#include "wpcis/report.hpp"

#include <sstream>

#include <json.hpp>

#include "wpcis/errors.hpp"

namespace wpcis {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool agrees(const ScanRecord& r) {
  if (!r.manual_label) return false;
  return (r.verdict.kind == VerdictKind::Vulnerable && *r.manual_label == ManualLabel::vulnerable) ||
         (r.verdict.kind == VerdictKind::NotVulnerable &&
          *r.manual_label == ManualLabel::not_vulnerable);
}

std::optional<VerdictKind> parse_verdict_kind(std::string_view text) {
  for (auto k : {VerdictKind::Vulnerable, VerdictKind::NotVulnerable, VerdictKind::Indeterminate}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

[[noreturn]] void bad_report(const std::string& what) {
  throw Error(ErrorCode::ConfigParseError, "invalid report JSON: " + what);
}

std::int64_t get_int(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) bad_report(std::string("missing integer '") + key + "'");
  return obj[key].get<std::int64_t>();
}

Share get_share(const json& value, const std::string& key) {
  if (!value.is_object()) bad_report("split entry '" + key + "' is not an object");
  return Share{get_int(value, "count"), static_cast<int>(get_int(value, "percent"))};
}

}  // namespace

std::string_view to_string(ManualLabel label) noexcept {
  return label == ManualLabel::vulnerable ? "vulnerable" : "not_vulnerable";
}

std::optional<ManualLabel> parse_manual_label(std::string_view text) noexcept {
  if (text == "vulnerable") return ManualLabel::vulnerable;
  if (text == "not_vulnerable") return ManualLabel::not_vulnerable;
  return std::nullopt;
}

int percent_of(std::int64_t part, std::int64_t whole) noexcept {
  if (whole <= 0) return 0;
  return static_cast<int>((200 * part + whole) / (2 * whole));
}

AggregateReport aggregate(std::span<const ScanRecord> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no scan records to aggregate");

  AggregateReport report;
  report.total = static_cast<std::int64_t>(records.size());
  for (Sector s : kSectors) {
    if (s != Sector::unknown) report.sector_split[s] = {};
  }

  bool all_labeled = true;
  for (const auto& r : records) {
    all_labeled = all_labeled && r.manual_label.has_value();
    switch (r.verdict.kind) {
      case VerdictKind::Vulnerable:
        ++report.vulnerable;
        if (r.verdict.version) ++report.version_split[*r.verdict.version].count;
        ++report.sector_split[r.sector].count;
        break;
      case VerdictKind::NotVulnerable:
        ++report.not_vulnerable;
        break;
      case VerdictKind::Indeterminate:
        ++report.indeterminate;
        break;
    }
  }

  report.vulnerable_pct = percent_of(report.vulnerable, report.total);
  for (auto& [_, share] : report.version_split) share.percent = percent_of(share.count, report.vulnerable);
  for (auto& [_, share] : report.sector_split) share.percent = percent_of(share.count, report.vulnerable);
  if (all_labeled) report.accuracy_pct = accuracy(records);
  return report;
}

int accuracy(std::span<const ScanRecord> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no scan records to compare");
  std::string missing;
  std::int64_t agreements = 0;
  for (const auto& r : records) {
    if (!r.manual_label) {
      missing += (missing.empty() ? "" : ", ") + r.target.str();
      continue;
    }
    if (agrees(r)) ++agreements;
  }
  if (!missing.empty()) throw Error(ErrorCode::MissingLabels, "no manual label for: " + missing);
  return percent_of(agreements, static_cast<std::int64_t>(records.size()));
}

ReportDocument make_document(std::span<const ScanRecord> records) {
  ReportDocument doc;
  doc.aggregate = aggregate(records);
  doc.records.reserve(records.size());
  for (const auto& r : records) {
    doc.records.push_back(ReportEntry{r.target.str(), r.verdict.kind, r.verdict.version,
                                      r.verdict.vulnerable_url, r.sector, r.duration_ms});
  }
  return doc;
}

std::string emit(const ReportDocument& document, OutputFormat format) {
  const AggregateReport& a = document.aggregate;
  switch (format) {
    case OutputFormat::json: {
      ordered_json out;
      out["total"] = a.total;
      out["vulnerable"] = a.vulnerable;
      out["not_vulnerable"] = a.not_vulnerable;
      out["indeterminate"] = a.indeterminate;
      out["vulnerable_pct"] = a.vulnerable_pct;
      out["version_split"] = ordered_json::object();
      for (const auto& [v, s] : a.version_split) {
        out["version_split"][v.str()] = {{"count", s.count}, {"percent", s.percent}};
      }
      out["sector_split"] = ordered_json::object();
      for (const auto& [sector, s] : a.sector_split) {
        out["sector_split"][std::string(to_string(sector))] = {{"count", s.count}, {"percent", s.percent}};
      }
      out["accuracy_pct"] = a.accuracy_pct ? ordered_json(*a.accuracy_pct) : ordered_json(nullptr);
      out["records"] = ordered_json::array();
      for (const auto& e : document.records) {
        ordered_json rec;
        rec["url"] = e.url;
        rec["verdict"] = std::string(to_string(e.verdict));
        rec["version"] = e.version ? ordered_json(e.version->str()) : ordered_json(nullptr);
        rec["vulnerable_url"] = e.vulnerable_url ? ordered_json(*e.vulnerable_url) : ordered_json(nullptr);
        rec["sector"] = std::string(to_string(e.sector));
        rec["duration_ms"] = e.duration_ms;
        out["records"].push_back(std::move(rec));
      }
      return out.dump(2) + "\n";
    }
    case OutputFormat::csv: {
      std::ostringstream out;
      out << "dimension,key,count,percent\n";
      out << "verdict,vulnerable," << a.vulnerable << ',' << a.vulnerable_pct << '\n';
      out << "verdict,not_vulnerable," << a.not_vulnerable << ','
          << percent_of(a.not_vulnerable, a.total) << '\n';
      out << "verdict,indeterminate," << a.indeterminate << ','
          << percent_of(a.indeterminate, a.total) << '\n';
      for (const auto& [v, s] : a.version_split) out << "version," << v.str() << ',' << s.count << ',' << s.percent << '\n';
      for (const auto& [sector, s] : a.sector_split) {
        out << "sector," << to_string(sector) << ',' << s.count << ',' << s.percent << '\n';
      }
      // Agreement count is not kept in the aggregate, so the count cell is empty.
      if (a.accuracy_pct) out << "accuracy,manual,," << *a.accuracy_pct << '\n';
      return out.str();
    }
    case OutputFormat::text: {
      std::ostringstream out;
      out << "WordPress REST API content injection scan report\n";
      out << "\n1. Vulnerability found / not found\n";
      out << "Vulnerable: " << a.vulnerable << '/' << a.total << " (" << a.vulnerable_pct << "%)\n";
      out << "Not vulnerable: " << a.not_vulnerable << '/' << a.total << " ("
          << percent_of(a.not_vulnerable, a.total) << "%)\n";
      out << "Inconclusive: " << a.indeterminate << '/' << a.total << " ("
          << percent_of(a.indeterminate, a.total) << "%)\n";
      out << "\n2. Vulnerable sites by version\n";
      if (a.version_split.empty()) out << "(none)\n";
      for (const auto& [v, s] : a.version_split) {
        out << "Version " << v.str() << ": " << s.count << " (" << s.percent << "%)\n";
      }
      out << "\n3. Vulnerable sites by sector\n";
      for (const auto& [sector, s] : a.sector_split) {
        out << to_string(sector) << ": " << s.count << " (" << s.percent << "%)\n";
      }
      out << "\n4. Accuracy\n";
      if (a.accuracy_pct) {
        out << "Accuracy vs manual: " << *a.accuracy_pct << "%\n";
      } else {
        out << "Accuracy vs manual: n/a (no manual labels)\n";
      }
      return out.str();
    }
  }
  return {};
}

ReportDocument parse_report_json(std::string_view text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) bad_report("not JSON");
  if (!doc.is_object()) bad_report("top level is not an object");

  ReportDocument out;
  AggregateReport& a = out.aggregate;
  a.total = get_int(doc, "total");
  a.vulnerable = get_int(doc, "vulnerable");
  a.not_vulnerable = get_int(doc, "not_vulnerable");
  a.indeterminate = get_int(doc, "indeterminate");
  a.vulnerable_pct = static_cast<int>(get_int(doc, "vulnerable_pct"));

  if (!doc.contains("version_split") || !doc["version_split"].is_object()) bad_report("missing version_split");
  for (const auto& [key, value] : doc["version_split"].items()) {
    const auto v = find_version(key);
    if (!v) bad_report("bad version key '" + key + "'");
    a.version_split[*v] = get_share(value, key);
  }
  if (!doc.contains("sector_split") || !doc["sector_split"].is_object()) bad_report("missing sector_split");
  for (const auto& [key, value] : doc["sector_split"].items()) {
    const auto s = parse_sector(key);
    if (!s) bad_report("bad sector key '" + key + "'");
    a.sector_split[*s] = get_share(value, key);
  }
  if (doc.contains("accuracy_pct") && doc["accuracy_pct"].is_number_integer()) {
    a.accuracy_pct = doc["accuracy_pct"].get<int>();
  }

  if (doc.contains("records")) {
    if (!doc["records"].is_array()) bad_report("records is not an array");
    for (const auto& rec : doc["records"]) {
      if (!rec.is_object()) bad_report("record is not an object");
      ReportEntry e;
      e.url = rec.value("url", "");
      const auto kind = parse_verdict_kind(rec.value("verdict", ""));
      if (!kind) bad_report("bad verdict in record for '" + e.url + "'");
      e.verdict = *kind;
      if (rec.contains("version") && rec["version"].is_string()) e.version = find_version(rec["version"].get<std::string>());
      if (rec.contains("vulnerable_url") && rec["vulnerable_url"].is_string()) {
        e.vulnerable_url = rec["vulnerable_url"].get<std::string>();
      }
      e.sector = parse_sector(rec.value("sector", "unknown")).value_or(Sector::unknown);
      e.duration_ms = rec.value("duration_ms", std::int64_t{0});
      out.records.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace wpcis

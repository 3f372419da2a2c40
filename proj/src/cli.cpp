#include "wpcis/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "wpcis/batch.hpp"
#include "wpcis/detector.hpp"
#include "wpcis/mock_server.hpp"
#include "wpcis/report.hpp"

namespace wpcis::cli {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_output(const std::string& text, const std::optional<std::string>& path, std::ostream& out) {
  if (!path) {
    out << text;
    return;
  }
  std::ofstream file(*path, std::ios::binary);
  if (!file) throw Error(ErrorCode::FileNotFound, "cannot write " + *path);
  file << text;
}

// Minimal RFC 4180 field splitter; enough for the labels file.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  for (auto& f : fields) f = trim(f);
  return fields;
}

struct LabelRow {
  std::size_t line = 0;
  Sector sector = Sector::unknown;
  std::optional<ManualLabel> label;
  bool matched = false;
};

std::map<std::string, LabelRow> read_labels(const std::string& path) {
  std::istringstream in(read_file(path));
  std::map<std::string, LabelRow> rows;
  std::string line;
  std::size_t number = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (header) {
      header = false;
      if (fields.empty() || fields[0] != "url") {
        throw Error(ErrorCode::LabelJoinError, path + ": expected header url,sector,manual_label");
      }
      continue;
    }
    const std::string where = path + ":" + std::to_string(number);
    LabelRow row;
    row.line = number;
    TargetUrl target;
    try {
      target = normalize_target(fields[0]);
    } catch (const Error& e) {
      throw Error(ErrorCode::LabelJoinError, where + ": " + e.what());
    }
    if (fields.size() > 1 && !fields[1].empty()) {
      const auto sector = parse_sector(fields[1]);
      if (!sector) throw Error(ErrorCode::LabelJoinError, where + ": unknown sector '" + fields[1] + "'");
      row.sector = *sector;
    }
    if (fields.size() > 2 && !fields[2].empty()) {
      row.label = parse_manual_label(fields[2]);
      if (!row.label) throw Error(ErrorCode::LabelJoinError, where + ": unknown manual_label '" + fields[2] + "'");
    }
    rows[target.str()] = row;
  }
  return rows;
}

ScanOptions options_with_env_timeout() {
  ScanOptions options;
  if (const char* env = std::getenv("WPCIS_TIMEOUT_MS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long long value = std::strtoll(env, &end, 10);
    if (end != nullptr && *end == '\0' && value > 0) options.timeout_ms = value;
  }
  return options;
}

int usage_error(std::ostream& err, const std::string& message) {
  err << "wpcis: " << message << '\n';
  return kExitUsage;
}

}  // namespace

std::string banner() {
  return "+++++\n"
         "+ wpcis : WordPress REST API content injection scanner\n"
         "+ Checks: WordPress 4.7.0 and 4.7.1, /wp/v2/posts id coercion\n"
         "+ Credit: issue publicly disclosed by Sucuri Labs, February 2017\n"
         "+ Scope : scan only sites you are authorized to test\n"
         "+++++\n";
}

int cmd_scan(const std::string& url, const ScanOptions& options, std::ostream& out, std::ostream& err) {
  TargetUrl target;
  try {
    target = normalize_target(url);
  } catch (const Error& e) {
    return usage_error(err, e.what());
  }

  DetectOptions detect_options;
  detect_options.coercion = options.coercion_mode;
  detect_options.consent_token = options.consent_token;
  if (detect_options.coercion == CoercionMode::active && !has_valid_consent(options.consent_token)) {
    return usage_error(err, "--coercion active requires --consent " + std::string(kConsentToken));
  }

  HttpClientConfig config;
  config.timeout = std::chrono::milliseconds(options.timeout_ms);
  NetworkClient client(config);

  out << banner() << "Target: " << target.str() << '\n';
  Verdict verdict;
  try {
    verdict = detect(target, detect_options, client);
  } catch (const Error& e) {
    verdict.kind = VerdictKind::Indeterminate;
    verdict.reason = e.what();
  }
  out << render_verdict(verdict);
  switch (verdict.kind) {
    case VerdictKind::Vulnerable: return kExitVulnerable;
    case VerdictKind::NotVulnerable: return kExitNotVulnerable;
    case VerdictKind::Indeterminate: return kExitIndeterminate;
  }
  return kExitIndeterminate;
}

int cmd_scan_file(const std::string& path, const std::string* labels_path, const ScanOptions& options,
                  std::ostream& out, std::ostream& err) {
  if (options.coercion_mode == CoercionMode::active && !has_valid_consent(options.consent_token)) {
    return usage_error(err, "--coercion active requires --consent " + std::string(kConsentToken));
  }
  if (options.concurrency < 1) return usage_error(err, "--concurrency must be at least 1");

  std::vector<BatchTarget> targets;
  try {
    std::istringstream in(read_file(path));
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      const std::string text = trim(line);
      if (text.empty() || text.front() == '#') continue;
      try {
        targets.push_back(BatchTarget{normalize_target(text), Sector::unknown, std::nullopt});
      } catch (const Error& e) {
        return usage_error(err, path + ":" + std::to_string(number) + ": " + e.what());
      }
    }
    if (targets.empty()) return usage_error(err, path + ": no targets");

    if (labels_path != nullptr) {
      auto labels = read_labels(*labels_path);
      for (auto& t : targets) {
        const auto it = labels.find(t.target.str());
        if (it == labels.end()) continue;
        t.sector = it->second.sector;
        t.manual_label = it->second.label;
        it->second.matched = true;
      }
      std::string unmatched;
      for (const auto& [url, row] : labels) {
        if (!row.matched) unmatched += "\n  line " + std::to_string(row.line) + ": " + url;
      }
      if (!unmatched.empty()) {
        throw Error(ErrorCode::LabelJoinError, "label rows without a matching target:" + unmatched);
      }
    }
  } catch (const Error& e) {
    return usage_error(err, e.what());
  }

  const auto records = scan_batch(targets, options, network_client_factory(options));
  try {
    write_output(emit(make_document(records), options.output_format), options.output_path, out);
  } catch (const Error& e) {
    return usage_error(err, e.what());
  }
  const bool any_indeterminate = std::any_of(records.begin(), records.end(), [](const ScanRecord& r) {
    return r.verdict.kind == VerdictKind::Indeterminate;
  });
  return any_indeterminate ? kExitIndeterminate : 0;
}

int cmd_mock_serve(const std::string& fleet_path, const std::string& bind, bool host_routing,
                   std::ostream& out, std::ostream& err) {
  std::vector<mock::MockSiteSpec> fleet;
  try {
    fleet = mock::parse_fleet_json(read_file(fleet_path));
  } catch (const Error& e) {
    return usage_error(err, e.what());
  }

  // Block the shutdown signals before any server thread exists so only
  // sigwait below sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::vector<std::string> order;
  for (const auto& spec : fleet) order.push_back(spec.site_id);

  std::unique_ptr<mock::MockServer> server;
  try {
    server = mock::serve_fleet(std::move(fleet), bind,
                               host_routing ? mock::Routing::host_header : mock::Routing::path_prefix);
  } catch (const Error& e) {
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    err << "wpcis: " << e.what() << '\n';
    return e.code() == ErrorCode::BindFailure ? kExitUnavailable : kExitUsage;
  }

  for (const auto& id : order) out << server->base_url(id) << '\n';
  out.flush();

  int received = 0;
  sigwait(&signals, &received);
  server->stop();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  return 0;
}

int cmd_report(const std::string& in_path, OutputFormat format, const std::string* output_path,
               std::ostream& out, std::ostream& err) {
  try {
    const auto document = parse_report_json(read_file(in_path));
    std::optional<std::string> path;
    if (output_path != nullptr) path = *output_path;
    write_output(emit(document, format), path, out);
  } catch (const Error& e) {
    return usage_error(err, e.what());
  }
  return 0;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"WordPress 4.7.0/4.7.1 REST API content injection scanner", "wpcis"};
  app.require_subcommand(1);

  ScanOptions options = options_with_env_timeout();
  std::string coercion = std::string(to_string(options.coercion_mode));
  std::string format = std::string(to_string(options.output_format));
  std::string consent;
  std::string output;
  std::string labels;

  auto add_scan_flags = [&](CLI::App* cmd) {
    cmd->add_option("--timeout-ms", options.timeout_ms, "Per-request timeout in milliseconds")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--coercion", coercion, "Id coercion check: off, passive or active")
        ->check(CLI::IsMember({"off", "passive", "active"}));
    cmd->add_option("--consent", consent, "Consent token required for --coercion active");
  };

  std::string url;
  auto* scan = app.add_subcommand("scan", "Scan one target");
  scan->add_option("url", url, "Target URL")->required();
  add_scan_flags(scan);

  std::string list_path;
  auto* scan_file = app.add_subcommand("scan-file", "Scan every URL listed in a file");
  scan_file->add_option("path", list_path, "File with one URL per line")->required();
  scan_file->add_option("--labels", labels, "CSV with url,sector,manual_label");
  scan_file->add_option("--concurrency", options.concurrency, "Parallel scan workers")
      ->check(CLI::PositiveNumber);
  scan_file->add_option("--format", format, "Report format: json, csv or text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  scan_file->add_option("--output", output, "Write the report to this file");
  add_scan_flags(scan_file);

  std::string fleet_path;
  std::string bind = "127.0.0.1:8080";
  bool host_routing = false;
  auto* mock_cmd = app.add_subcommand("mock", "Mock WordPress fleet");
  mock_cmd->require_subcommand(1);
  auto* serve = mock_cmd->add_subcommand("serve", "Serve a fleet until interrupted");
  serve->add_option("--fleet", fleet_path, "Fleet JSON file")->required();
  serve->add_option("--bind", bind, "host:port to listen on");
  serve->add_flag("--host-routing", host_routing, "Select sites by Host header instead of /site/{id}");

  std::string in_path;
  auto* report = app.add_subcommand("report", "Re-render a JSON report");
  report->add_option("--in", in_path, "JSON report written by scan-file")->required();
  report->add_option("--format", format, "Output format: json, csv or text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  report->add_option("--output", output, "Write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  options.coercion_mode = parse_coercion_mode(coercion).value_or(CoercionMode::passive);
  options.output_format = parse_output_format(format).value_or(OutputFormat::text);
  if (!consent.empty()) options.consent_token = consent;
  if (!output.empty()) options.output_path = output;

  if (scan->parsed()) return cmd_scan(url, options, out, err);
  if (scan_file->parsed()) {
    return cmd_scan_file(list_path, labels.empty() ? nullptr : &labels, options, out, err);
  }
  if (serve->parsed()) return cmd_mock_serve(fleet_path, bind, host_routing, out, err);
  if (report->parsed()) {
    return cmd_report(in_path, options.output_format, output.empty() ? nullptr : &output, out, err);
  }
  return kExitUsage;
}

}  // namespace wpcis::cli

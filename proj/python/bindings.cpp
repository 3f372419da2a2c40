#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <chrono>

#include "wpcis/detector.hpp"
#include "wpcis/id_coercion.hpp"
#include "wpcis/mock_server.hpp"
#include "wpcis/probe.hpp"
#include "wpcis/report.hpp"

namespace py = pybind11;
using namespace wpcis;

namespace {

template <typename Enum, std::size_t N>
Enum enum_from(const std::string& text, const std::array<Enum, N>& options, const char* what) {
  for (Enum e : options) {
    if (to_string(e) == text) return e;
  }
  throw Error(ErrorCode::InvalidArgument, std::string("unknown ") + what + " '" + text + "'");
}

constexpr std::array<CoercionMode, 3> kModes = {CoercionMode::off, CoercionMode::passive, CoercionMode::active};
constexpr std::array<EndpointVariant, 3> kVariants = {EndpointVariant::plain_path, EndpointVariant::index_php_path,
                                                      EndpointVariant::rest_route_query};
constexpr std::array<VerdictKind, 3> kKinds = {VerdictKind::Vulnerable, VerdictKind::NotVulnerable,
                                               VerdictKind::Indeterminate};
constexpr std::array<OutputFormat, 3> kFormats = {OutputFormat::json, OutputFormat::csv, OutputFormat::text};

py::dict verdict_dict(const Verdict& v) {
  py::dict d;
  d["verdict"] = std::string(to_string(v.kind));
  d["version"] = v.version ? py::object(py::str(v.version->str())) : py::object(py::none());
  d["vulnerable_url"] = v.vulnerable_url ? py::object(py::str(*v.vulnerable_url)) : py::object(py::none());
  d["reason"] = v.reason;
  if (v.coercion) {
    py::dict c;
    c["mode"] = std::string(to_string(v.coercion->mode));
    c["result"] = std::string(to_string(v.coercion->result));
    c["request_url"] = v.coercion->request_url;
    c["response_status"] = v.coercion->response_status;
    d["coercion"] = c;
  } else {
    d["coercion"] = py::none();
  }
  d["text"] = render_verdict(v);
  return d;
}

py::dict scan(const std::string& url, const std::string& coercion, std::optional<std::string> consent,
              std::int64_t timeout_ms) {
  const TargetUrl target = normalize_target(url);
  DetectOptions options;
  options.coercion = enum_from(coercion, kModes, "coercion mode");
  options.consent_token = std::move(consent);
  HttpClientConfig config;
  config.timeout = std::chrono::milliseconds(timeout_ms);
  Verdict v;
  {
    py::gil_scoped_release release;
    NetworkClient client(config);
    v = detect(target, options, client);
  }
  return verdict_dict(v);
}

std::string aggregate_report(const std::vector<py::dict>& rows, const std::string& format) {
  std::vector<ScanRecord> records;
  for (const auto& row : rows) {
    ScanRecord r;
    r.target = normalize_target(row["url"].cast<std::string>());
    r.verdict.kind = enum_from(row["verdict"].cast<std::string>(), kKinds, "verdict");
    if (row.contains("version") && !row["version"].is_none()) {
      r.verdict.version = parse_version(row["version"].cast<std::string>());
    }
    if (row.contains("sector") && !row["sector"].is_none()) {
      const auto text = row["sector"].cast<std::string>();
      r.sector = parse_sector(text).value_or(Sector::unknown);
    }
    if (row.contains("manual_label") && !row["manual_label"].is_none()) {
      const auto text = row["manual_label"].cast<std::string>();
      r.manual_label = parse_manual_label(text);
      if (!r.manual_label) throw Error(ErrorCode::InvalidArgument, "unknown manual_label '" + text + "'");
    }
    records.push_back(std::move(r));
  }
  return emit(make_document(records), enum_from(format, kFormats, "format"));
}

class PyMockServer {
 public:
  PyMockServer(const std::string& fleet_json, bool host_routing)
      : server_(mock::parse_fleet_json(fleet_json),
                host_routing ? mock::Routing::host_header : mock::Routing::path_prefix) {}

  int start(const std::string& host, int port) {
    server_.start(host, port);
    return server_.port();
  }
  void stop() {
    py::gil_scoped_release release;
    server_.stop();
  }
  mock::MockServer& get() { return server_; }

 private:
  mock::MockServer server_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "wpcis scanner core";

  py::register_exception<Error>(m, "WpcisError", PyExc_RuntimeError);

  m.def("normalize_target", [](const std::string& url) { return normalize_target(url).str(); }, py::arg("url"));
  m.def("parse_version", [](const std::string& text) { return parse_version(text).str(); }, py::arg("text"));
  m.def("is_affected_version", [](const std::string& text) { return is_affected_version(parse_version(text)); },
        py::arg("text"));
  m.def(
      "build_endpoint_url",
      [](const std::string& url, const std::string& variant) {
        return build_endpoint_url(normalize_target(url), enum_from(variant, kVariants, "endpoint variant"));
      },
      py::arg("url"), py::arg("variant") = "plain_path");
  m.def(
      "parse_posts",
      [](const std::string& body) {
        py::list out;
        for (const auto& p : parse_posts(body).posts) {
          py::dict d;
          d["id"] = p.id;
          d["date"] = p.date;
          d["date_gmt"] = p.date_gmt;
          d["guid"] = p.guid_rendered;
          d["modified"] = p.modified;
          d["slug"] = p.slug;
          out.append(d);
        }
        return out;
      },
      py::arg("body"));
  m.def("leading_integer", &leading_integer, py::arg("text"));
  m.def("coerced_id", &coerced_id, py::arg("n"), py::arg("suffix"));
  m.def(
      "build_injection_request",
      [](const std::string& endpoint, std::int64_t post_id, const std::string& marker, const std::string& mode) {
        const auto spec = build_injection_request(endpoint, post_id, marker, enum_from(mode, kModes, "coercion mode"));
        py::dict d;
        d["method"] = std::string(to_string(spec.method));
        d["url"] = spec.url;
        d["body"] = spec.body ? py::object(py::str(*spec.body)) : py::object(py::none());
        d["content_type"] = spec.content_type ? py::object(py::str(*spec.content_type)) : py::object(py::none());
        return d;
      },
      py::arg("endpoint"), py::arg("post_id"), py::arg("marker") = "", py::arg("mode") = "passive");
  m.def(
      "render_verdict",
      [](const std::string& kind, std::optional<std::string> version, std::optional<std::string> url,
         const std::string& reason) {
        Verdict v;
        v.kind = enum_from(kind, kKinds, "verdict");
        if (version) v.version = parse_version(*version);
        v.vulnerable_url = std::move(url);
        v.reason = reason;
        return render_verdict(v);
      },
      py::arg("verdict"), py::arg("version") = py::none(), py::arg("vulnerable_url") = py::none(),
      py::arg("reason") = "");
  m.def("scan", &scan, py::arg("url"), py::arg("coercion") = "passive", py::arg("consent") = py::none(),
        py::arg("timeout_ms") = kDefaultTimeoutMs);
  m.def("aggregate_report", &aggregate_report, py::arg("records"), py::arg("format") = "json");

  py::class_<PyMockServer>(m, "MockServer")
      .def(py::init<const std::string&, bool>(), py::arg("fleet_json"), py::arg("host_routing") = false)
      .def("start", &PyMockServer::start, py::arg("host") = "127.0.0.1", py::arg("port") = 0)
      .def("stop", &PyMockServer::stop)
      .def_property_readonly("port", [](PyMockServer& s) { return s.get().port(); })
      .def("base_url", [](PyMockServer& s, const std::string& id) { return s.get().base_url(id); })
      .def("site_ids", [](PyMockServer& s) { return s.get().site_ids(); })
      .def("store_hash", [](PyMockServer& s, const std::string& id) { return s.get().store_hash(id); })
      .def("count_requests", [](PyMockServer& s, const std::string& method) { return s.get().count_requests(method); })
      .def("__enter__", [](PyMockServer& s) -> PyMockServer& { return s; }, py::return_value_policy::reference)
      .def("__exit__", [](PyMockServer& s, py::args) { s.stop(); });
}

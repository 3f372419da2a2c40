#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support.hpp"
#include "wpcis/cli.hpp"
#include "wpcis/mock_server.hpp"

using namespace wpcis;
using wpcis::mock::SiteBehavior;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "wpcis");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("wpcis-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  std::string write(const std::string& name, const std::string& content) const {
    const auto file = path_ / name;
    std::ofstream(file) << content;
    return file.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("scan exit codes") {
  mock::MockServer server({testing::site("v", "WordPress 4.7.1", SiteBehavior::vulnerable),
                           testing::site("p", "WordPress 4.7.2", SiteBehavior::patched)});
  server.start("127.0.0.1", 0);

  const auto vuln = run_cli({"scan", server.base_url("v")});
  CHECK(vuln.code == cli::kExitVulnerable);
  CHECK(vuln.out.starts_with(cli::banner()));
  CHECK(vuln.out.find("Target: " + server.base_url("v") + "\n") != std::string::npos);
  CHECK(vuln.out.ends_with("[+] This site is vulnerable\n[+] Version: 4.7.1\n"
                           "[+] Here is the vulnerable parameter: " +
                           server.base_url("v") + "/wp-json/wp/v2/posts/\n"));

  const auto safe = run_cli({"scan", server.base_url("p")});
  CHECK(safe.code == cli::kExitNotVulnerable);
  CHECK(safe.out.ends_with("[!] Website is Not Vulnerable to Wordpress content injection vulnerability\n"));

  const auto down = run_cli({"scan", "http://127.0.0.1:1/", "--timeout-ms", "300"});
  CHECK(down.code == cli::kExitIndeterminate);
  CHECK(down.out.find("[?] Scan inconclusive: ") != std::string::npos);

  CHECK(run_cli({"scan", "ftp://example.test/"}).code == cli::kExitUsage);
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"scan"}).code == cli::kExitUsage);
  CHECK(run_cli({"scan", server.base_url("v"), "--coercion", "loud"}).code == cli::kExitUsage);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("active coercion needs the consent literal") {
  mock::MockServer server({testing::site("v", "WordPress 4.7.0", SiteBehavior::vulnerable)});
  server.start("127.0.0.1", 0);
  const auto hash = server.store_hash("v");

  const auto refused = run_cli({"scan", server.base_url("v"), "--coercion", "active"});
  CHECK(refused.code == cli::kExitUsage);
  CHECK(refused.err.find("I-OWN-THIS-TARGET") != std::string::npos);
  CHECK(run_cli({"scan", server.base_url("v"), "--coercion", "active", "--consent", "yes"}).code ==
        cli::kExitUsage);
  TempDir dir;
  const auto list = dir.write("urls.txt", server.base_url("v") + "\n");
  CHECK(run_cli({"scan-file", list, "--coercion", "active"}).code == cli::kExitUsage);
  CHECK(server.request_log().empty());
  CHECK(server.store_hash("v") == hash);

  const auto granted =
      run_cli({"scan", server.base_url("v"), "--coercion", "active", "--consent", "I-OWN-THIS-TARGET"});
  CHECK(granted.code == cli::kExitVulnerable);
  CHECK(server.count_requests("POST") == 1);
  CHECK(server.store_hash("v") != hash);
}

TEST_CASE("timeout from the environment, overridden by the flag") {
  auto slow = testing::site("s", "WordPress 4.7.0", SiteBehavior::vulnerable);
  slow.latency_ms = 300;
  mock::MockServer server({slow});
  server.start("127.0.0.1", 0);

  ::setenv("WPCIS_TIMEOUT_MS", "100", 1);
  CHECK(run_cli({"scan", server.base_url("s")}).code == cli::kExitIndeterminate);
  CHECK(run_cli({"scan", server.base_url("s"), "--timeout-ms", "3000"}).code == cli::kExitVulnerable);
  ::unsetenv("WPCIS_TIMEOUT_MS");
}

TEST_CASE("scan-file") {
  mock::MockServer server({testing::site("a", "WordPress 4.7.0", SiteBehavior::vulnerable),
                           testing::site("b", "WordPress 4.7.5", SiteBehavior::patched),
                           testing::site("c", "", SiteBehavior::not_wordpress)});
  server.start("127.0.0.1", 0);
  TempDir dir;
  const auto list = dir.write("urls.txt", "# fleet\n" + server.base_url("a") + "\n\n" + server.base_url("b") +
                                              "\n" + server.base_url("c") + "/\n");

  SUBCASE("no labels: accuracy absent") {
    const auto r = run_cli({"scan-file", list, "--format", "json"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["total"] == 3);
    CHECK(doc["vulnerable"] == 1);
    CHECK(doc["accuracy_pct"].is_null());
    CHECK(doc["records"][0]["url"] == server.base_url("a"));
    CHECK(doc["records"][2]["url"] == server.base_url("c"));
  }
  SUBCASE("labels join on the normalized URL") {
    const auto labels = dir.write("labels.csv", "url,sector,manual_label\n" + server.base_url("a") +
                                                    "/,education,vulnerable\n" + server.base_url("b") +
                                                    ",blog,not_vulnerable\n" + server.base_url("c") +
                                                    ",medical,vulnerable\n");
    const auto out = dir.path("report.txt");
    const auto r = run_cli({"scan-file", list, "--labels", labels, "--output", out});
    CHECK(r.code == 0);
    const auto text = slurp(out);
    CHECK(text.find("education: 1 (100%)\n") != std::string::npos);
    CHECK(text.find("Accuracy vs manual: 67%\n") != std::string::npos);

    const auto json_path = dir.path("report.json");
    CHECK(run_cli({"scan-file", list, "--labels", labels, "--format", "json", "--output", json_path}).code == 0);
    const auto rerender = run_cli({"report", "--in", json_path, "--format", "text"});
    CHECK(rerender.code == 0);
    CHECK(rerender.out == text);
    const auto csv = run_cli({"report", "--in", json_path, "--format", "csv"});
    CHECK(csv.out.starts_with("dimension,key,count,percent\nverdict,vulnerable,1,33\n"));
  }
  SUBCASE("unmatched label rows are rejected") {
    const auto labels =
        dir.write("labels.csv", "url,sector,manual_label\nhttp://elsewhere.test,blog,vulnerable\n");
    const auto r = run_cli({"scan-file", list, "--labels", labels});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("line 2") != std::string::npos);
    CHECK(server.request_log().empty());
  }
  SUBCASE("bad inputs") {
    CHECK(run_cli({"scan-file", dir.write("empty.txt", "# nothing\n\n")}).code == cli::kExitUsage);
    CHECK(run_cli({"scan-file", dir.path("missing.txt")}).code == cli::kExitUsage);
    CHECK(run_cli({"scan-file", list, "--concurrency", "0"}).code == cli::kExitUsage);
    CHECK(run_cli({"report", "--in", dir.write("bad.json", "{")}).code == cli::kExitUsage);
  }
}

TEST_CASE("mock serve failures return before serving") {
  TempDir dir;
  const auto bad = dir.write("bad.json", "[{\"site_id\": }]");
  const auto r = run_cli({"mock", "serve", "--fleet", bad});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("line 1") != std::string::npos);

  mock::MockServer holder({testing::site("h", "", SiteBehavior::not_wordpress)});
  holder.start("127.0.0.1", 0);
  const auto fleet = dir.write("fleet.json", R"([{"site_id":"a","behavior":"not_wordpress"}])");
  const auto busy = run_cli({"mock", "serve", "--fleet", fleet, "--bind", "127.0.0.1:" + std::to_string(holder.port())});
  CHECK(busy.code == cli::kExitUnavailable);
  CHECK(run_cli({"mock", "serve", "--fleet", fleet, "--bind", "nonsense"}).code != 0);
}

}  // TEST_SUITE

// Drives the torsionlab executable end to end.
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "torsionlab/oracles.hpp"

using nlohmann::json;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path work() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("tl_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct Cleanup {
  fs::path dir = work();
  ~Cleanup() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
} cleanup;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  f << s;
}

Run run(const std::string& cmd, const std::string& config, const std::string& extra = "") {
  static int n = 0;
  const fs::path cfg = work() / ("cfg" + std::to_string(n) + ".json");
  const fs::path out = work() / ("out" + std::to_string(n) + ".txt");
  const fs::path err = work() / ("err" + std::to_string(n) + ".txt");
  ++n;
  write(cfg, config);
  const std::string line = std::string("\"") + TORSIONLAB_CLI + "\" " + cmd + " --config \"" +
                           cfg.string() + "\" " + extra + " > \"" + out.string() + "\" 2> \"" +
                           err.string() + "\"";
  const int status = std::system(line.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::vector<double>> csv_rows(const std::string& text, std::string* header = nullptr) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!std::isdigit(static_cast<unsigned char>(line[0])) && line[0] != '-') {
      if (header) *header = line;
      continue;
    }
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("compute: untwisted circle against its oracle") {
  const Run r = run("compute", R"({"version":"v1","model":{"type":"circle-untwisted","R":2}})");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["version"] == "v1");
  CHECK(j["T"]["re"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(j["oracle"]["abs_diff"].get<double>() < 1e-6);
  for (const char* key : {"model", "split", "small_part", "large_part", "minus_two_log_T", "log_T",
                          "err_small", "err_large"}) {
    CHECK(j.contains(key));
  }
}

TEST_CASE("compute: hyperbolic space") {
  const Run r = run("compute", R"({"model":{"type":"hyperbolic3","x":3.14159265}})");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["minus_two_log_T"]["re"].get<double>() == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("compute: config errors exit 2 with an error object") {
  Run r = run("compute", R"({"model":{"type":"circle-untwisted","R":-1}})");
  CHECK(r.code == 2);
  const json e = json::parse(r.err);
  CHECK(e["error"]["message"] == "R must be positive");
  CHECK(e["version"] == "v1");
  CHECK(run("compute", R"({"model":{"type":"circle-untwisted","R":1},"bogus":1})").code == 2);
  CHECK(run("compute", R"({"model":{"type":"circle-untwisted","R":1,"bogus":1}})").code == 2);
  CHECK(run("compute", R"({"model":{"type":"torus"}})").code == 2);
  CHECK(run("compute", "{not json").code == 2);
  CHECK(run("compute", R"({"version":"v2","model":{"type":"hyperbolic3","x":1}})").code == 2);
  CHECK(run("compute", R"({"model":{"type":"hyperbolic3","x":"one"}})").code == 2);
}

TEST_CASE("compute: numerical failure exits 3") {
  const Run r = run("compute",
                    R"({"model":{"type":"hyperbolic3","x":3.14},
                        "quadrature":{"rel_tol":1e-15,"abs_tol":0,"max_subdivisions":1}})");
  CHECK(r.code == 3);
  CHECK(json::parse(r.err).contains("error"));
  const Run u = run("compute", R"({"model":{"type":"sampled","t":[1,2,3],"re":[1,0.5,0.3]}})");
  CHECK(u.code == 3);
}

TEST_CASE("compute output is byte-identical across runs") {
  const std::string cfg = R"({"model":{"type":"circle","R":1.7,"theta":2.1,"rot":0.25}})";
  const Run a = run("compute", cfg), b = run("compute", cfg);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("trace-dump: hyperbolic samples match the closed-form trace") {
  const Run r = run("trace-dump", R"({"model":{"type":"hyperbolic3","x":3.141592653589793},
                                      "t_grid":[2.0,0.5,1.0]})");
  REQUIRE(r.code == 0);
  std::string header;
  const auto rows = csv_rows(r.out, &header);
  CHECK(header == "t,re,im");
  REQUIRE(rows.size() == 3);
  double prev = 0.0;
  for (const auto& row : rows) {
    CHECK(row[0] > prev);
    prev = row[0];
    const double oracle = -torsionlab::oracles::h3_trace(pi, row[0]);
    CHECK(std::abs(std::abs(row[1]) - std::abs(oracle)) <= 1e-14 * std::abs(oracle));
  }
  CHECK(run("trace-dump", R"({"model":{"type":"hyperbolic3","x":1},"t_grid":[]})").code == 2);
}

TEST_CASE("trace-dump: sampled round trip is bit exact") {
  const Run first = run("trace-dump", R"({"model":{"type":"circle","R":1.3,"theta":1.1},
                                          "t_grid":{"lo":0.01,"hi":100,"n":25,"spacing":"log"}})");
  REQUIRE(first.code == 0);
  const fs::path csv = work() / "dump.csv";
  write(csv, first.out);
  const auto rows = csv_rows(first.out);
  std::string grid = "[";
  for (size_t i = 0; i < rows.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", rows[i][0]);
    grid += (i ? "," : "") + std::string(buf);
  }
  grid += "]";
  const Run second =
      run("trace-dump", R"({"model":{"type":"sampled","csv":")" + csv.string() +
                            R"(","decay":{"kind":"exponential","rate":1}},"t_grid":)" + grid + "}");
  REQUIRE(second.code == 0);
  CHECK(second.out == first.out);
}

TEST_CASE("check: decomposition names the matching variant") {
  const Run r =
      run("check", R"({"checks":[{"name":"decomposition","R":1,"theta":1.5708,"sigma":1}]})");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["check"] == "decomposition");
  CHECK(j["pass"] == true);
  CHECK(j["evidence"]["matching_variant"] == "GammaConsistent");
}

TEST_CASE("check: several checks as JSON lines, and a failing one exits 4") {
  const Run ok = run("check", R"({"model":{"type":"hyperbolic3","x":2},
    "checks":[{"name":"gbc"},{"name":"split"},{"name":"rescale","c":[0.5,2]},
              {"name":"product","left":{"type":"circle","theta":1},"right":{"type":"hyperbolic3","x":2},
               "chi_left":1,"chi_right":2}]})");
  REQUIRE(ok.code == 0);
  CHECK(csv_rows(ok.out).empty());
  std::istringstream lines(ok.out);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    CHECK(json::parse(line)["pass"] == true);
    ++n;
  }
  CHECK(n == 4);
  const Run bad = run("check", R"({"checks":[{"name":"even_dim","left":{"type":"circle","theta":1},
    "right":{"type":"hyperbolic3","x":2},"chi_left":1,"chi_right":1}]})");
  CHECK(bad.code == 4);
  CHECK(json::parse(bad.out)["pass"] == false);
  CHECK(run("check", R"({"checks":[{"name":"nope"}]})").code == 2);
}

TEST_CASE("sweep: hyperbolic grid in order, matching 1/(4 sin^2(x/2))") {
  const std::string cfg = R"({"model":{"type":"hyperbolic3","x":1},"param":"x",
                              "values":{"lo":0.6,"hi":3.14,"n":32}})";
  const Run r = run("sweep", cfg);
  REQUIRE(r.code == 0);
  std::string header;
  const auto rows = csv_rows(r.out, &header);
  CHECK(header.rfind("x,minus_two_log_T", 0) == 0);
  REQUIRE(rows.size() == 32);
  for (size_t i = 0; i < rows.size(); ++i) {
    const double s = std::sin(rows[i][0] / 2);
    CHECK(rows[i][1] == doctest::Approx(1.0 / (4 * s * s)).epsilon(1e-6));
    if (i) {
      CHECK(rows[i][0] > rows[i - 1][0]);
      CHECK(rows[i][1] < rows[i - 1][1]);
    }
  }
  const Run serial = run("sweep", cfg.substr(0, cfg.size() - 1) + R"(,"threads":1})");
  CHECK(serial.out == r.out);
  CHECK(run("sweep", R"({"model":{"type":"hyperbolic3","x":1},"param":"y","values":[1]})").code == 2);
}

TEST_CASE("ns: hyperbolic decay exponent and circle classification") {
  const Run h = run("ns", R"({"model":{"type":"hyperbolic3","x":3.141592653589793}})");
  REQUIRE(h.code == 0);
  const json j = json::parse(h.out);
  CHECK(j["decay"]["kind"] == "polynomial");
  CHECK(j["decay"]["alpha"].get<double>() >= 0.45);
  CHECK(j["decay"]["alpha"].get<double>() <= 0.55);
  const Run c = run("ns", R"({"model":{"type":"circle","theta":1},"t_window":[1,100],
                              "growth":{"kind":"polynomial","b":2,"a":1}})");
  REQUIRE(c.code == 0);
  const json k = json::parse(c.out);
  CHECK(k["decay"]["kind"] == "exponential");
  CHECK(k["metric_condition"]["holds"] == true);
  const Run s = run("ns", R"({"t":[1,2,4,8,16,32,64,128,256],"abs":[1,0.25,0.0625,0.015625,
    0.00390625,0.0009765625,0.000244140625,6.103515625e-05,1.52587890625e-05]})");
  REQUIRE(s.code == 0);
  CHECK(json::parse(s.out)["decay"]["alpha"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("--out writes the file instead of stdout") {
  const fs::path out = work() / "written.json";
  const Run r = run("compute", R"({"model":{"type":"real-line","R":1,"g":1}})",
                    "--out \"" + out.string() + "\"");
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const json j = json::parse(slurp(out));
  CHECK(j["log_T"]["re"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("usage errors") {
  const std::string base = std::string("\"") + TORSIONLAB_CLI + "\"";
  CHECK(WEXITSTATUS(std::system((base + " compute > /dev/null 2>&1").c_str())) == 2);
  CHECK(WEXITSTATUS(std::system((base + " frobnicate > /dev/null 2>&1").c_str())) == 2);
  CHECK(WEXITSTATUS(std::system(
            ("echo '{\"model\":{\"type\":\"hyperbolic3\",\"x\":2}}' | " + base + " compute --stdin > /dev/null")
                .c_str())) == 0);
}

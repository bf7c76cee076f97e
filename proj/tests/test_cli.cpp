// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "degenkernel/cli.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "degenkernel");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = degenkernel::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

double field(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string k, v;
  while (in >> k >> v) {
    if (k == key) return std::strtod(v.c_str(), nullptr);
  }
  FAIL("missing field " << key);
  return 0.0;
}

std::string temp_path(const std::string& name) { return std::string(P_tmpdir) + "/degenkernel_test_" + name; }

}  // namespace

TEST_CASE("eval") {
  auto r = cli({"eval", "--family", "power", "--alpha", "1", "--x", "1", "--y", "1", "--t", "1"});
  CHECK(r.code == 0);
  CHECK(field(r.out, "value") == doctest::Approx(0.21526928924893766).epsilon(1e-13));

  r = cli({"eval", "--a", "1", "--b", "0", "--x", "1", "--y", "1", "--t", "1"});
  CHECK(r.code == 0);
  CHECK(field(r.out, "value") == doctest::Approx(0.17831791741872947).epsilon(1e-12));

  r = cli({"eval", "--a", "x^2", "--x", "1", "--y", "1", "--t", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("scale condition violated") != std::string::npos);
  const auto j = nlohmann::json::parse(r.err);
  CHECK(j["error"]["kind"] == "domain");
}

TEST_CASE("usage errors") {
  CHECK(cli({"eval", "--x", "1"}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"eval", "--a", "2x", "--x", "1", "--y", "1", "--t", "1"}).code == 1);  // syntax error
  CHECK(cli({"simulate", "--family", "power", "--alpha", "1", "--x0", "1", "--t", "1", "--paths", "0"}).code == 1);
  CHECK(cli({"table", "--a", "1", "--x-grid", "1:2", "--y-grid", "1:2:2", "--t-grid", "1:1:1"}).code == 1);
}

TEST_CASE("table: csv row count, bit-exact round trip, json") {
  const std::vector<std::string> base{"table", "--family", "power", "--alpha", "1.5", "--x-grid", "0.5:2:3",
                                      "--y-grid", "0.5:2:3:log", "--t-grid", "0.4:0.4:1"};
  auto r = cli(base);
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,y,t,p,quad_err,trunc_err");
  int rows = 0;
  auto again = cli(base);
  std::istringstream in2(again.out);
  std::getline(in2, line);
  while (std::getline(in, line)) {
    ++rows;
    // values parse back to the same doubles that a rerun prints
    std::string line2;
    std::getline(in2, line2);
    std::stringstream a(line), b(line2);
    std::string fa, fb;
    while (std::getline(a, fa, ',') && std::getline(b, fb, ',')) {
      CHECK(std::strtod(fa.c_str(), nullptr) == std::strtod(fb.c_str(), nullptr));
    }
  }
  CHECK(rows == 9);

  auto args = base;
  args.insert(args.end(), {"--format", "json"});
  r = cli(args);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.size() == 9);
  CHECK(j[0].contains("quad_err"));
}

TEST_CASE("classify") {
  for (auto [a, type] : {std::pair{"x^2", "natural"}, {"x^1.5", "exit"}, {"x^0.5", "regular"}}) {
    const auto r = cli({"classify", "--a", a, "--b", "0"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["boundary_type"] == type);
  }
}

TEST_CASE("simulate is reproducible and near the analytic survival") {
  const std::vector<std::string> args{"simulate", "--family", "power", "--alpha", "1", "--x0", "1", "--t", "1",
                                      "--paths", "20000", "--dt", "1e-3", "--seed", "42", "--bridge"};
  const auto a = cli(args);
  const auto b = cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(std::fabs(j["survival"].get<double>() - (1.0 - std::exp(-1.0))) < 4.0 * j["survival_se"].get<double>());

  const auto path = temp_path("hist.csv");
  auto with_hist = args;
  with_hist.insert(with_hist.end(), {"--hist-out", path, "--bins", "10"});
  REQUIRE(cli(with_hist).code == 0);
  std::ifstream f(path);
  std::string line;
  int n = 0;
  while (std::getline(f, line)) ++n;
  CHECK(n == 11);
  std::remove(path.c_str());
}

TEST_CASE("massloss") {
  auto r = cli({"massloss", "--alpha", "1", "--x", "1", "--t", "1"});
  CHECK(r.code == 0);
  CHECK(field(r.out, "mass_loss") == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  r = cli({"massloss", "--alpha", "1.99", "--x", "1", "--t", "1", "--asymptotic"});
  CHECK(r.code == 0);
  CHECK(field(r.out, "exponent_ratio") == doctest::Approx(0.944730056022277).epsilon(1e-12));
  CHECK(cli({"massloss", "--alpha", "2.5", "--x", "1", "--t", "1"}).code == 2);
}

TEST_CASE("config file mirrors flags; flags win") {
  const auto path = temp_path("config.json");
  {
    std::ofstream f(path);
    f << R"({"eval": {"family": "power", "alpha": 1.5, "x": 1, "y": 1, "t": 0.25}})";
  }
  auto r = cli({"--config", path, "eval", "--t", "0.5"});
  CHECK(r.code == 0);
  CHECK(field(r.out, "value") == doctest::Approx(0.35350170206677403).epsilon(1e-12));
  std::remove(path.c_str());
}

TEST_CASE("selftest filter and json") {
  auto r = cli({"selftest", "--filter", "symmetry", "--json"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["criteria"].size() == 1);
  CHECK(j["criteria"][0]["key"] == "symmetry");
  CHECK(cli({"selftest", "--filter", "nothing-matches"}).code == 1);
}

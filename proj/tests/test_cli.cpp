// Copyright 2026 The blindiqp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <catch_amalgamated.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "blindiqp/cli.hpp"
#include "blindiqp/xprog.hpp"

using namespace blindiqp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / fmt::format("blindiqp-cli-{}", std::random_device{}());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string run_process(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  pclose(p);
  return out;
}

const char* kSmallQ = R"({"theta": 0.39269908169872414, "q": [[1,0,1],[0,1,0]]})";
const char* kTwoBridge = R"({"qt": [[-1,0,1],[0,1,-1]]})";

}  // namespace

TEST_CASE("distribution prints a CSV of the exact distribution") {
  TempDir t;
  const auto r = cli({"distribution", t.write("p.json", kSmallQ)});
  REQUIRE(r.code == kExitOk);
  const auto d = exact_distribution(xprogram_from_json(json::parse(kSmallQ)));
  CHECK(r.out == to_csv(d));
}

TEST_CASE("protocol --exact reproduces the distribution") {
  TempDir t;
  const auto r = cli({"protocol", t.write("p.json", kSmallQ), t.write("g.json", kTwoBridge), "--exact"});
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j["runner"] == "blind");
  CHECK(j["tv_to_exact"].get<double>() < 1e-10);
  CHECK(j["distribution"].size() == 8);
}

TEST_CASE("sampled protocol runs are reproducible from the seed") {
  TempDir t;
  const auto p = t.write("p.json", kSmallQ), g = t.write("g.json", kTwoBridge);
  const auto a = cli({"protocol", p, g, "--samples", "50", "--seed", "7"});
  const auto b = cli({"protocol", p, g, "--samples", "50", "--seed", "7"});
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  const auto j = json::parse(a.out);
  CHECK(j["seed"] == 7);
  std::size_t total = 0;
  for (const auto& [k, v] : j["counts"].items()) total += v.get<std::size_t>();
  CHECK(total == 50);
  CHECK(j["transcript"].contains("order"));

  const auto u = cli({"sample", p, "--samples", "5"});
  REQUIRE(u.code == kExitOk);
  CHECK(json::parse(u.out).contains("seed"));
}

TEST_CASE("bias reports formula and direct values") {
  TempDir t;
  const auto r = cli({"bias", t.write("p.json", kSmallQ), "--direction", "101"});
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j["formula"].get<double>() == Catch::Approx(j["direct"].get<double>()).margin(1e-12));
  CHECK(cli({"bias", t.file("p.json"), "--direction", "10"}).code == kExitBadInput);
}

TEST_CASE("bad input exits with code 2 and a JSON error") {
  TempDir t;
  const auto p = t.write("p.json", kSmallQ), g = t.write("g.json", kTwoBridge);
  const auto unknown = cli({"protocol", p, g, "--adversary", "sneaky", "--exact"});
  CHECK(unknown.code == kExitBadInput);
  const auto e = json::parse(unknown.err);
  CHECK(e["message"].get<std::string>().find("honest") != std::string::npos);

  const auto bad = cli({"distribution", t.write("bad.json", "{\n  \"theta\": 0.1,\n  \"q\": [1,\n")});
  CHECK(bad.code == kExitBadInput);
  CHECK(json::parse(bad.err)["message"].get<std::string>().find("bad.json:") != std::string::npos);

  CHECK(cli({"distribution", t.file("missing.json")}).code == kExitBadInput);
  CHECK(cli({"nonsense"}).code == kExitBadInput);
  CHECK(cli({}).code == kExitBadInput);
}

TEST_CASE("security blindness on a one-bridge instance") {
  TempDir t;
  const auto inst = t.write("i.json", R"({"qt": [[-1]], "theta": 0.39269908169872414})");
  const auto r = cli({"security", inst, "--check", "blindness", "--phase", "after_state"});
  CHECK(r.code == kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j["pass"] == true);
  CHECK(j["phase"] == "after_state");
  CHECK(cli({"security", inst, "--phase", "sometime"}).code == kExitBadInput);
}

TEST_CASE("security checks on the two-bridge instance") {
  TempDir t;
  const auto inst = t.write("i.json", R"({"qt": [[-1,1],[1,1]], "theta": 0.39269908169872414})");
  const auto s = cli({"security", inst, "--phase", "after_state", "--all-maps"});
  CHECK(s.code == kExitOk);
  // The per-record state after the angles depends on Q.
  const auto a = cli({"security", inst, "--phase", "after_angles", "--all-maps"});
  CHECK(a.code == kExitCheckFailed);
  const auto j = json::parse(a.out);
  for (const auto& c : j["checks"]) CHECK(c["ensemble_pass"] == true);

  const auto sim = cli({"security", inst, "--check", "simulator", "--adversary", "zeros"});
  CHECK(sim.code == kExitOk);
}

TEST_CASE("security refuses oversized instances") {
  TempDir t;
  const auto inst = t.write("i.json", R"({"qt": [[-1,-1,1],[1,-1,1]], "theta": 0.3})");
  const auto r = cli({"security", inst});
  CHECK(r.code == kExitBadInput);
  CHECK(json::parse(r.err)["error"] == "guard");
}

TEST_CASE("hypothesis command") {
  const auto h = cli({"hypothesis", "--na", "7", "--samples", "2000", "--seed", "3"});
  CHECK(h.code == kExitOk);
  const auto j = json::parse(h.out);
  CHECK(j["decision"] == "pass");
  CHECK_FALSE(j.contains("q"));
  const auto u = cli({"hypothesis", "--samples", "2000", "--seed", "3", "--adversary", "uniform"});
  CHECK(u.code == kExitCheckFailed);
  CHECK(cli({"hypothesis", "--na", "9", "--samples", "10"}).code == kExitBadInput);
  const auto q = cli({"qr-matrix", "--na", "7"});
  REQUIRE(q.code == kExitOk);
  CHECK(json::parse(q.out)["residues"] == json{1, 2, 4});
}

TEST_CASE("output files") {
  TempDir t;
  const auto out = t.file("o.csv");
  REQUIRE(cli({"distribution", t.write("p.json", kSmallQ), "-o", out}).code == kExitOk);
  std::ifstream f(out);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == cli({"distribution", t.file("p.json")}).out);
}

TEST_CASE("the binary is deterministic for a fixed seed") {
  const char* bin = std::getenv("BLINDIQP_CLI");
  if (bin == nullptr) SKIP("BLINDIQP_CLI not set");
  TempDir t;
  const auto p = t.write("p.json", kSmallQ), g = t.write("g.json", kTwoBridge);
  const std::string cmd =
      fmt::format("'{}' protocol '{}' '{}' --samples 200 --seed 11", bin, p, g);
  const auto a = run_process(cmd), b = run_process(cmd);
  CHECK_FALSE(a.empty());
  CHECK(a == b);
  CHECK(a == cli({"protocol", p, g, "--samples", "200", "--seed", "11"}).out);
}

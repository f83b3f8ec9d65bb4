#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nakao/cli.hpp"

using namespace nakao;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::current_path() / "cli_scratch" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  std::ostringstream s;
  s << file.rdbuf();
  return s.str();
}

void spit(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("region writes csv, svg and json") {
  const fs::path dir = scratch("region");
  const std::string out = (dir / "r").string();
  const Run r = call({"region", "--n", "4", "--grid", "200", "--out", out});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(out + ".csv");
  CHECK(csv.rfind("p,q,alphaN,F,verdict,binding_component\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 200 * 200 + 1);
  CHECK(slurp(out + ".svg").find("<svg") != std::string::npos);
  const json m = json::parse(slurp(out + ".json"));
  CHECK(m.at("subcommand") == "region");
  CHECK(m.at("config").at("problem").at("n") == 4);
}

TEST_CASE("sequences closed forms all ok") {
  const fs::path dir = scratch("sequences");
  const std::string out = (dir / "s").string();
  const Run r = call({"sequences", "--n", "1", "--p", "2", "--q", "2", "--jmax", "41", "--out", out});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(out + ".csv");
  CHECK(csv.find("FAIL") == std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 42);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  const std::string out = (dir / "x").string();
  CHECK(call({"region", "--bogus", "1"}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"simulate", "--h", "abc", "--out", out}).code == 2);
  CHECK(call({"simulate", "--cfl", "1.5", "--out", out}).code == 2);

  spit(dir / "unknown.json", R"({"problem": {"n": 1, "colour": 3}})");
  CHECK(call({"simulate", "--config", (dir / "unknown.json").string(), "--out", out}).code == 2);
  spit(dir / "type.json", R"({"problem": {"n": "one"}})");
  CHECK(call({"simulate", "--config", (dir / "type.json").string(), "--out", out}).code == 2);
  spit(dir / "broken.json", "{");
  CHECK(call({"simulate", "--config", (dir / "broken.json").string(), "--out", out}).code == 2);
  CHECK(call({"simulate", "--config", (dir / "missing.json").string(), "--out", out}).code == 2);

  CHECK(call({"report", "--out", (dir / "no" / "such" / "dir" / "r").string()}).code == 1);
  // outside the blow-up region a sweep is a config error
  CHECK(call({"sweep", "--n", "3", "--p", "3", "--q", "3", "--out", out}).code == 2);
  // too short a horizon leaves ladder points without blow-up
  CHECK(call({"sweep", "--n", "1", "--p", "2", "--q", "2", "--T_max", "15", "--out", out}).code == 3);
  CHECK(call({"report", "--help"}).code == 0);
}

TEST_CASE("sweep from a config file") {
  const fs::path dir = scratch("sweep");
  const std::string out = (dir / "w").string();
  spit(dir / "sweep.json", json{{"problem", {{"n", 1}, {"p", 2.0}, {"q", 2.0}}},
                                {"numerics", {{"h", 0.02}, {"t_max", 60.0}}},
                                {"fit", {{"ladder", {0.4, 0.3, 0.2, 0.15, 0.1}}}},
                                {"output", {{"out", out}}}}
                               .dump());
  const Run r = call({"sweep", "--config", (dir / "sweep.json").string()});
  REQUIRE(r.code == 0);
  const json m = json::parse(slurp(out + ".json"));
  CHECK(m.at("verdict").at("consistent") == true);
  CHECK(m.at("verdict").at("predicted").get<double>() == doctest::Approx(0.75));
  CHECK(m.at("points").size() == 5);
}

TEST_CASE("config round trip and precedence") {
  const fs::path dir = scratch("roundtrip");
  const std::string out = (dir / "a").string();
  REQUIRE(call({"simulate", "--eps", "0.45", "--T_max", "3", "--shape", "cosine", "--out", out}).code == 0);
  const json first = json::parse(slurp(out + ".json"));
  CHECK(first.at("config").at("problem").at("epsilon") == 0.45);
  CHECK(first.at("config").at("data").at("shape") == "cosine");

  // feeding the recorded config back reproduces the run
  json again = first.at("config");
  again["output"]["out"] = (dir / "b").string();
  spit(dir / "b.json.in", again.dump());
  REQUIRE(call({"simulate", "--config", (dir / "b.json.in").string()}).code == 0);
  CHECK(slurp(out + ".csv") == slurp(dir / "b.csv"));

  // a flag beats the file
  REQUIRE(call({"simulate", "--config", (dir / "b.json.in").string(), "--eps", "0.3", "--out",
                (dir / "c").string()})
              .code == 0);
  const json third = json::parse(slurp(dir / "c.json"));
  CHECK(third.at("config").at("problem").at("epsilon") == 0.3);
  CHECK(third.at("config").at("numerics").at("t_max") == 3.0);

  const Run printed = call({"sweep", "--print-config", "--h", "0.05"});
  REQUIRE(printed.code == 0);
  CHECK(json::parse(printed.out).at("numerics").at("h") == 0.05);
  CHECK(json::parse(default_config("testfn")).at("problem").at("n") == 3);
}

TEST_CASE("reruns are byte identical") {
  // the json records the output prefix, so both runs write to the same place
  const fs::path dir = scratch("determinism");
  const std::string base = (dir / "d").string();
  std::map<std::string, std::string> first;
  for (int pass = 0; pass < 2; ++pass) {
    REQUIRE(call({"region", "--n", "3", "--grid", "60", "--jobs", pass == 0 ? "1" : "3", "--out", base + "_region"}).code == 0);
    REQUIRE(call({"curves", "--out", base + "_curves"}).code == 0);
    REQUIRE(call({"testfn", "--out", base + "_testfn"}).code == 0);
    REQUIRE(call({"simulate", "--T_max", "4", "--out", base + "_simulate"}).code == 0);
    for (const char* name : {"region", "curves", "testfn", "simulate"})
      for (const char* ext : {".csv", ".json"}) {
        const std::string path = base + "_" + name + ext;
        CAPTURE(path);
        if (pass == 0)
          first[path] = slurp(path);
        else
          CHECK(slurp(path) == first[path]);
      }
  }
}

TEST_CASE("NAKAO_JOBS fallback") {
  const fs::path dir = scratch("jobs");
  REQUIRE(call({"region", "--n", "2", "--grid", "50", "--out", (dir / "one").string()}).code == 0);
  setenv("NAKAO_JOBS", "3", 1);
  REQUIRE(call({"region", "--n", "2", "--grid", "50", "--out", (dir / "env").string()}).code == 0);
  setenv("NAKAO_JOBS", "garbage", 1);
  REQUIRE(call({"region", "--n", "2", "--grid", "50", "--out", (dir / "bad").string()}).code == 0);
  unsetenv("NAKAO_JOBS");
  CHECK(slurp(dir / "one.csv") == slurp(dir / "env.csv"));
  CHECK(slurp(dir / "one.csv") == slurp(dir / "bad.csv"));
}

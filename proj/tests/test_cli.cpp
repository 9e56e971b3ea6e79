#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <string>

#include <json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(PCE_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (auto n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string build_catalog(const std::string& fixture, const fs::path& dir) {
  const auto fx = pce::test::fixture(fixture);
  const auto catalog = (dir / (fixture + ".json")).string();
  auto r = run("stats build --data " + fx + " --config " + fx + "/stats.json --catalog " + catalog);
  REQUIRE(r.code == 0);
  return catalog;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("cli: build, estimate and oracle") {
  const auto dir = pce::test::scratch_dir("cli");
  const auto catalog = build_catalog("join", dir);
  const auto query = pce::test::fixture("join") + "/join.cq";

  auto text = run("estimate --catalog " + catalog + " --query " + query);
  REQUIRE(text.code == 0);
  auto json = run("estimate --catalog " + catalog + " --query " + query + " --format json");
  REQUIRE(json.code == 0);
  auto doc = nlohmann::json::parse(json.out);

  // Every method's bound in the JSON output appears verbatim on its text line.
  for (const auto& m : doc["methods"]) {
    REQUIRE(m["status"] == "ok");
    const std::string line = m["method"].get<std::string>() + ": " + m["bound"].get<std::string>() + " (log2 " +
                              m["log2"].get<std::string>() + ")";
    CHECK(text.out.find(line) != std::string::npos);
  }
  auto oracle = run("oracle --data " + pce::test::fixture("join") + " --query " + query);
  REQUIRE(oracle.code == 0);
  CHECK(std::stod(doc["min"]["bound"].get<std::string>()) >= std::stod(oracle.out));

  auto subset = run("estimate --catalog " + catalog + " --query " + query + " --methods agm,dsb --format json");
  CHECK(nlohmann::json::parse(subset.out)["methods"].size() == 2);
  CHECK(run("estimate --catalog " + catalog + " --query " + query + " --methods nope").code == 1);
}

TEST_CASE("cli: exit codes") {
  const auto dir = pce::test::scratch_dir("cli-codes");
  const auto fx = pce::test::fixture("degrees");

  SUBCASE("missing CSV leaves no catalog") {
    write(dir / "stats.json", R"({"relations": [{"name": "Nope", "simple": true}]})");
    const auto catalog = dir / "out.json";
    CHECK(run("stats build --data " + fx + " --config " + (dir / "stats.json").string() + " --catalog " +
              catalog.string())
              .code == 1);
    CHECK_FALSE(fs::exists(catalog));
  }
  SUBCASE("bad query") {
    const auto catalog = build_catalog("degrees", dir);
    write(dir / "bad.cq", "Q(X :- R(X).");
    CHECK(run("estimate --catalog " + catalog + " --query " + (dir / "bad.cq").string()).code == 1);
  }
  SUBCASE("no method can bound the query") {
    const auto catalog = build_catalog("degrees", dir);
    const auto single = fx + "/single.cq";
    CHECK(run("estimate --catalog " + catalog + " --query " + single + " --methods cb --max-vars 2").code == 2);
    CHECK(run("estimate --catalog " + catalog + " --query " + single + " --methods cb,agm --max-vars 2").code == 0);
    write(dir / "other.cq", "Q(X) :- Unknown(X).");
    CHECK(run("estimate --catalog " + catalog + " --query " + (dir / "other.cq").string()).code == 1);
  }
  SUBCASE("oracle cap") {
    const auto tri = pce::test::fixture("triangle");
    CHECK(run("oracle --data " + tri + " --query " + tri + "/triangle.cq --oracle-cap 2").code == 3);
    CHECK(run("oracle --data " + tri + " --query " + tri + "/triangle.cq").out == "8\n");
  }
  SUBCASE("usage errors") {
    CHECK(run("").code == 1);
    CHECK(run("estimate --catalog x").code == 1);
    CHECK(run("verify bogus").code == 1);
  }
}

TEST_CASE("cli: verify is reproducible") {
  auto a = run("verify all --seed 11 --trials 3 --format json");
  auto b = run("verify all --seed 11 --trials 3 --format json");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(nlohmann::json::parse(a.out)["violations"] == 0);
  CHECK(run("verify all --seed 11 --trials 0").code == 0);
  auto fixtures = run("verify shannon --trials 1 --data " + pce::test::fixture("triangle"));
  CHECK(fixtures.code == 0);
  CHECK(fixtures.out.find("fixtures") != std::string::npos);
}

#include <doctest.h>

#include <fstream>

#include "pce/catalog.hpp"
#include "pce/error.hpp"
#include "pce/estimate.hpp"
#include "pce/format.hpp"
#include "pce/stats.hpp"
#include "support.hpp"

using namespace pce;
using pce::test::scratch_dir;

namespace {

std::string write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST_CASE("load the eight-tuple example relation") {
  auto r = load_csv(test::fixture("degrees/R.csv"), "R", true);
  CHECK(r.size() == 8);
  CHECK(r.attributes() == std::vector<std::string>{"X", "Y", "Z"});
  CHECK(r.rows() == test::example_relation().rows());
}

TEST_CASE("csv dialect") {
  auto dir = scratch_dir("csv");
  SUBCASE("duplicates collapse") {
    auto r = load_csv(write_file(dir / "d.csv", "A,B\n1,2\n1,2\n3,4\n"), "D", true);
    CHECK(r.size() == 2);
  }
  SUBCASE("header-only file is an empty relation") {
    auto r = load_csv(write_file(dir / "e.csv", "A,B\n"), "E", true);
    CHECK(r.empty());
    CHECK(r.arity() == 2);
  }
  SUBCASE("no header names attributes A1..Ak") {
    auto r = load_csv(write_file(dir / "n.csv", "1,x\n2,y\n"), "N", false);
    CHECK(r.attributes() == std::vector<std::string>{"A1", "A2"});
  }
  SUBCASE("quotes, CRLF, blank lines and integer detection") {
    auto r = load_csv(write_file(dir / "q.csv", "A,B\r\n\"x,y\",\"say \"\"hi\"\"\"\r\n\r\n12,+3\r\n"), "Q", true);
    REQUIRE(r.size() == 2);
    CHECK(r.rows()[0] == Tuple{std::int64_t{12}, std::string("+3")});
    CHECK(r.rows()[1] == Tuple{std::string("x,y"), std::string("say \"hi\"")});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(load_csv(write_file(dir / "r.csv", "A,B\n1,2\n3\n"), "R", true), InputError);
    CHECK_THROWS_AS(load_csv(write_file(dir / "z.csv", ""), "Z", true), InputError);
    CHECK_THROWS_AS(load_csv((dir / "missing.csv").string(), "M", true), InputError);
  }
}

TEST_CASE("load_csv is idempotent on its own output") {
  auto dir = scratch_dir("csv-idem");
  auto r = load_csv(write_file(dir / "a.csv", "A,B,C\n\"x,1\",2,z\n007,-4,\"\"\"q\"\"\"\n007,-4,\"\"\"q\"\"\"\n"), "A", true);
  write_csv(r, (dir / "b.csv").string());
  auto again = load_csv((dir / "b.csv").string(), "A", true);
  CHECK(again.rows() == r.rows());
  CHECK(again.attributes() == r.attributes());
  write_csv(again, (dir / "c.csv").string());
  auto third = load_csv((dir / "c.csv").string(), "A", true);
  CHECK(third.rows() == again.rows());
}

TEST_CASE("catalog round-trip") {
  auto dir = scratch_dir("catalog");
  const auto path = (dir / "c.json").string();

  SUBCASE("cardinality entry") {
    StatisticsCatalog c;
    c.set_schema("R", {"X", "Y", "Z"});
    c.add(StatEntry{"R", {}, {"X", "Y", "Z"}, NormOrder(1), 8, {}, {}});
    save_catalog(c, path);
    CHECK(load_catalog(path) == c);
  }
  SUBCASE("empty catalog") {
    StatisticsCatalog c;
    save_catalog(c, path);
    CHECK(load_catalog(path) == c);
  }
  SUBCASE("infinity is the token inf") {
    StatisticsCatalog c;
    c.add(StatEntry{"R", {"X"}, {"Y"}, NormOrder::infinity(), 2, {}, {}});
    save_catalog(c, path);
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    CHECK(text.find("\"inf\"") != std::string::npos);
    CHECK(load_catalog(path) == c);
  }
  SUBCASE("awkward doubles, conditions and sequences survive bit-exactly") {
    StatisticsCatalog c;
    c.set_schema("S", {"A", "B"});
    c.add(StatEntry{"S", {"A"}, {"B"}, NormOrder(2), std::sqrt(18.0), {}, {}});
    c.add(StatEntry{"S", {"A"}, {"B"}, NormOrder(1.5), 0.1 + 0.2, StatCondition::mcv("B", std::string("x")), {}});
    c.add(StatEntry{"S", {"A"}, {"B"}, NormOrder(3), 1e-300, StatCondition::common("B"), {}});
    c.add(StatEntry{"S", {"A"}, {"B"}, NormOrder(3), 7.25, StatCondition::bucket("B", std::int64_t{1}, std::int64_t{9}),
                    std::cbrt(100.0)});
    c.add(SequenceEntry{"S", {"A"}, {"B"}, CompressedDegreeSequence{{{4, 1}, {2.0000000000000004, 5}}, true}});
    c.meta().built_at = "2024-01-01T00:00:00Z";
    c.meta().digests["/data/S.csv"] = "fnv1a64:0123";
    save_catalog(c, path);
    CHECK(load_catalog(path) == c);
  }
}

TEST_CASE("catalog rejects bad input") {
  StatisticsCatalog c;
  c.add(StatEntry{"R", {"X"}, {"Y"}, NormOrder(1), 3, {}, {}});
  CHECK_THROWS_AS(c.add(StatEntry{"R", {"X"}, {"Y", "X"}, NormOrder(1), 4, {}, {}}), InputError);
  CHECK_THROWS_AS(catalog_from_json("{\"version\": 99, \"entries\": []}"), InputError);
  CHECK_THROWS_AS(catalog_from_json("{not json"), ParseError);
  CHECK_THROWS_AS(c.schema("nope"), StatisticsError);
}

TEST_CASE("exact decimals") {
  for (double x : {0.0, 1.0, 0.1, 1.0 / 3.0, std::sqrt(2.0), 1e300, 5e-324, 123456789.123456789})
    CHECK(parse_decimal(exact_decimal(x)) == x);
  CHECK(exact_decimal(INFINITY) == "inf");
  CHECK(std::isinf(parse_decimal("inf")));
  CHECK_THROWS_AS(parse_decimal("twelve"), ParseError);
  CHECK(significant(2.0 / 3.0) == "0.666666666667");
}

TEST_CASE("catalog build from config") {
  auto dir = scratch_dir("build");
  auto cfg = load_stats_config(test::fixture("degrees/stats.json"));
  auto c = build_catalog(cfg, test::fixture("degrees"));
  const auto* e = c.find("R", {"X"}, {"Y"}, NormOrder::infinity());
  REQUIRE(e);
  CHECK(e->value == 2);
  const auto* card = c.find("R", {}, {"X", "Y", "Z"}, NormOrder(1));
  REQUIRE(card);
  CHECK(card->value == 8);
  // The explicit max_runs request wins over the simple-mode default.
  const auto* seq = c.find_sequence("R", {"X"}, {"Y", "Z"});
  REQUIRE(seq);
  CHECK(seq->sequence.runs.size() <= 2);
  CHECK(cdf_dominates(seq->sequence, {3, 2, 2, 1}));
  CHECK(c.find_sequence("R", {"Y"}, {"X", "Z"})->sequence.expand() == std::vector<double>{4, 2, 1, 1});
  CHECK(c.meta().digests.size() == 1);
  CHECK(c.meta().digests.begin()->second == file_digest(test::fixture("degrees/R.csv")));

  CHECK(build_catalog(parse_stats_config("{\"relations\": []}"), dir.string()).entries().empty());
  CHECK_THROWS_AS(build_catalog(parse_stats_config("{\"relations\": [{\"name\": \"Nope\"}]}"), dir.string()),
                  InputError);
}

TEST_CASE("join sequences come from certified catalog entries") {
  auto catalog = [](bool certified) {
    StatisticsCatalog c;
    c.set_schema("R", {"A", "B"});
    c.set_schema("S", {"B", "C"});
    c.add(SequenceEntry{"R", {"B"}, {"A"}, {{{3, 1}, {1, 2}}, true}});
    c.add(SequenceEntry{"S", {"B"}, {"C"}, {{{2, 2}}, certified}});
    return c;
  };
  auto q = parse_query("J(X,Y,Z) :- R(X,Y), S(Y,Z).");
  CHECK_THROWS_AS(catalog_join_sequences(catalog(false), q), StatisticsError);

  auto js = catalog_join_sequences(catalog(true), q);
  CHECK(js.a.expand() == std::vector<double>{3, 1, 1});
  CHECK(js.b.expand() == std::vector<double>{2, 2});
  CHECK_THROWS_AS(catalog_join_sequences(catalog(true), parse_query("Q(X,Y) :- R(X,Y).")), StatisticsError);
}

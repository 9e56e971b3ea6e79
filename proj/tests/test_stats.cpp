#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "pce/error.hpp"
#include "pce/random_instance.hpp"
#include "pce/stats.hpp"
#include "support.hpp"

using namespace pce;

namespace {

using Degrees = std::vector<std::int64_t>;

DegreeSequence seq(Degrees d) { return DegreeSequence{"R", {}, {}, std::move(d)}; }

// Direct definition, no log-space tricks.
double direct_norm(const Degrees& d, double p) {
  if (std::isinf(p)) return d.empty() ? 0.0 : static_cast<double>(*std::max_element(d.begin(), d.end()));
  double s = 0;
  for (auto x : d) s += std::pow(static_cast<double>(x), p);
  return std::pow(s, 1 / p);
}

// Brute force: group the projection on cond+target by cond with a map.
Degrees brute_degrees(const Relation& r, const std::vector<std::string>& cond, const std::vector<std::string>& target) {
  auto ci = r.attribute_indices(cond);
  auto ti = r.attribute_indices(target);
  std::map<Tuple, std::set<Tuple>> groups;
  for (const auto& row : r.rows()) {
    Tuple k, v;
    for (int i : ci) k.push_back(row[i]);
    for (int i : ti) v.push_back(row[i]);
    groups[k].insert(v);
  }
  Degrees d;
  for (const auto& [k, vs] : groups) d.push_back(static_cast<std::int64_t>(vs.size()));
  std::sort(d.begin(), d.end(), std::greater<>());
  return d;
}

std::vector<Run> runs(std::initializer_list<std::pair<double, std::int64_t>> rs) {
  std::vector<Run> out;
  for (auto [v, n] : rs) out.push_back({v, n});
  return out;
}

}  // namespace

TEST_CASE("degree sequences of the example relation") {
  const auto r = test::example_relation();
  CHECK(degree_sequence(r, {"X"}, {"Y", "Z"}).degrees == Degrees{3, 2, 2, 1});
  CHECK(degree_sequence(r, {"X"}, {"Y"}).degrees == Degrees{2, 2, 2, 1});
  CHECK(degree_sequence(r, {"X", "Y"}, {"Z"}).degrees == Degrees{2, 1, 1, 1, 1, 1, 1});
  CHECK(degree_sequence(r, {}, {"X", "Y", "Z"}).degrees == Degrees{8});
  // deg(V|U) = deg(UV|U)
  CHECK(degree_sequence(r, {"X"}, {"X", "Y"}).degrees == degree_sequence(r, {"X"}, {"Y"}).degrees);
  CHECK_THROWS_AS(degree_sequence(r, {"W"}, {"Y"}), InputError);
}

TEST_CASE("degree sequences agree with grouping on random relations") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    auto r = random_relation(rng, "R", 3, static_cast<int>(rng.uniform(1, 40)), static_cast<int>(rng.uniform(2, 5)));
    for (auto [cond, target] : std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>{
             {{}, {"A1"}}, {{"A1"}, {"A2"}}, {{"A1"}, {"A2", "A3"}}, {{"A2", "A3"}, {"A1"}}, {{}, {"A1", "A2", "A3"}}}) {
      auto ds = degree_sequence(r, cond, target);
      CHECK(ds.degrees == brute_degrees(r, cond, target));
      CHECK(std::is_sorted(ds.degrees.begin(), ds.degrees.end(), std::greater<>()));
    }
    // The l1 norm of deg(*|U) is |R|.
    CHECK(lp_norm(degree_sequence(r, {"A1"}, {"A2", "A3"}), NormOrder(1)) == doctest::Approx(r.size()));
  }
}

TEST_CASE("lp norms") {
  auto d = seq({3, 2, 2, 1});
  CHECK(lp_norm(d, NormOrder(1)) == doctest::Approx(8).epsilon(1e-12));
  CHECK(lp_norm(d, NormOrder::infinity()) == 3);
  CHECK(lp_norm(d, NormOrder(2)) == doctest::Approx(direct_norm(d.degrees, 2)).epsilon(1e-12));
  CHECK(lp_norm(d, NormOrder(2)) == doctest::Approx(std::sqrt(18.0)).epsilon(1e-12));
  CHECK(lp_norm(seq({}), NormOrder(2)) == 0);
  CHECK_THROWS_AS(NormOrder(0), InputError);
  CHECK_THROWS_AS(NormOrder(-1), InputError);
  // Huge entries stay finite in log space.
  auto big = seq(Degrees(1000, std::int64_t{1} << 60));
  CHECK(std::isfinite(log_lp_norm(big, NormOrder(30))));
}

TEST_CASE("lp norms are non-increasing in p for p >= 1") {
  Rng rng(3);
  const std::vector<NormOrder> ps{NormOrder(1), NormOrder(1.5), NormOrder(2), NormOrder(3), NormOrder::infinity()};
  for (int t = 0; t < 200; ++t) {
    auto d = seq(random_degrees(rng, static_cast<int>(rng.uniform(1, 30)), 50));
    for (std::size_t i = 1; i < ps.size(); ++i) {
      CHECK(lp_norm(d, ps[i]) <= lp_norm(d, ps[i - 1]) * (1 + 1e-12));
      if (!ps[i].is_infinite())
        CHECK(lp_norm(d, ps[i]) == doctest::Approx(direct_norm(d.degrees, ps[i].value())).epsilon(1e-10));
    }
  }
}

TEST_CASE("run-length compression") {
  CHECK(run_length_compress(seq({4, 2, 2, 1, 1, 1})).runs == runs({{4, 1}, {2, 2}, {1, 3}}));
  CHECK(run_length_compress(seq({5, 5, 5, 5})).runs == runs({{5, 4}}));
  CHECK(run_length_compress(seq({3, 2, 1})).runs == runs({{3, 1}, {2, 1}, {1, 1}}));
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    auto d = random_degrees(rng, static_cast<int>(rng.uniform(1, 40)), 6);
    auto c = run_length_compress(seq(d));
    CHECK(c.expand() == std::vector<double>(d.begin(), d.end()));
    CHECK(lp_norm(c, NormOrder(3)) == doctest::Approx(lp_norm(seq(d), NormOrder(3))));
  }
}

TEST_CASE("cdf upper compression") {
  const Degrees a{4, 2, 2, 1, 1, 1};
  const std::vector<double> cdf{4, 6, 8, 9, 10, 11};

  SUBCASE("two runs") {
    auto c = cdf_upper_compress(seq(a), 2);
    CHECK(c.runs.size() <= 2);
    CHECK(c.length() == 6);
    CHECK(c.runs.front().value >= 4);
    auto got = c.cdf();
    for (std::size_t i = 0; i < cdf.size(); ++i) CHECK(got[i] >= cdf[i] - 1e-9);
    CHECK(c.cdf_certified);
  }
  SUBCASE("the hand-made three-run answer also dominates") {
    CompressedDegreeSequence hand{runs({{4, 1}, {3.5, 2}, {0, 3}}), false};
    CHECK(cdf_dominates(hand, {a.begin(), a.end()}));
    CHECK(hand.cdf() == std::vector<double>{4, 7.5, 11, 11, 11, 11});
  }
  SUBCASE("single run") {
    auto c = cdf_upper_compress(seq({2, 1}), 1);
    CHECK(c.runs == runs({{2, 2}}));
  }
  SUBCASE("identity when the runs fit") {
    CHECK(cdf_upper_compress(seq(a), 3) == run_length_compress(seq(a)));
    CHECK(cdf_upper_compress(seq(a), 10) == run_length_compress(seq(a)));
  }
  SUBCASE("exhaustive dominance on random sequences") {
    Rng rng(17);
    for (int t = 0; t < 500; ++t) {
      auto d = random_degrees(rng, static_cast<int>(rng.uniform(1, 60)), 100);
      const int k = static_cast<int>(rng.uniform(1, 8));
      auto c = cdf_upper_compress(seq(d), k);
      CHECK(static_cast<int>(c.runs.size()) <= k);
      CHECK(c.length() == static_cast<std::int64_t>(d.size()));
      CHECK(c.expand().front() >= d.front());
      CHECK(c.non_increasing());
      std::vector<double> orig(d.begin(), d.end());
      double ours = 0, theirs = 0;
      auto e = c.expand();
      for (std::size_t i = 0; i < d.size(); ++i) {
        ours += e[i];
        theirs += orig[i];
        CHECK(ours >= theirs - 1e-9 * theirs);
      }
    }
  }
  CHECK_THROWS_AS(cdf_upper_compress(seq(a), 0), InputError);
}

TEST_CASE("conditional statistics") {
  const auto r = test::example_relation();
  SUBCASE("most common value of Y") {
    auto entries = build_conditional_stats(r, "Y", {"X"}, {"Z"}, {NormOrder::infinity()}, 1, 0);
    auto it = std::find_if(entries.begin(), entries.end(),
                           [](const StatEntry& e) { return e.condition.kind == StatCondition::Kind::mcv; });
    REQUIRE(it != entries.end());
    CHECK(it->condition.value == Value{std::string("b")});
    auto slice = r.select(1, [](const Value& v) { return v == Value{std::string("b")}; });
    CHECK(slice.size() == 4);
    CHECK(it->value == direct_norm(brute_degrees(slice, {"X"}, {"Z"}), INFINITY));
  }
  SUBCASE("a key attribute gives all-ones sequences") {
    auto key = test::pairs("K", {{1, 5}, {2, 5}, {3, 6}, {4, 7}});
    for (const auto& e : build_conditional_stats(key, "A", {}, {"B"}, default_norm_orders(), 0, 0)) {
      CHECK(e.condition.kind == StatCondition::Kind::common);
      CHECK(e.value == doctest::Approx(1));
    }
  }
  SUBCASE("no MCVs and no buckets leave only common entries") {
    auto entries = build_conditional_stats(r, "Y", {"X"}, {"Z"}, {NormOrder(1), NormOrder(2)}, 0, 0);
    CHECK(entries.size() == 2);
    for (const auto& e : entries) CHECK(e.condition.kind == StatCondition::Kind::common);
  }
  SUBCASE("buckets bound every value they contain") {
    Rng rng(9);
    auto rr = random_relation(rng, "R", 2, 50, 12);
    auto entries = build_conditional_stats(rr, "A1", {}, {"A2"}, {NormOrder(2)}, 2, 3);
    for (const auto& e : entries) {
      if (e.condition.kind != StatCondition::Kind::bucket) continue;
      REQUIRE(e.range_value);
      CHECK(*e.range_value >= e.value - 1e-12);
      for (const auto& row : rr.rows()) {
        if (row[0] < e.condition.lo || e.condition.hi < row[0]) continue;
        auto slice = rr.select(0, [&](const Value& v) { return v == row[0]; });
        bool mcv = std::any_of(entries.begin(), entries.end(), [&](const StatEntry& m) {
          return m.condition.kind == StatCondition::Kind::mcv && m.condition.value == row[0];
        });
        if (!mcv) CHECK(lp_norm(degree_sequence(slice, {}, {"A2"}), NormOrder(2)) <= e.value * (1 + 1e-12));
      }
    }
  }
  CHECK_THROWS_AS(build_conditional_stats(r, "Y", {}, {"X"}, {NormOrder(1)}, -1, 0), InputError);
  CHECK_THROWS_AS(build_conditional_stats(r, "Y", {}, {"X"}, {NormOrder(1)}, 0, -1), InputError);
}

TEST_CASE("predicate parsing") {
  auto e = parse_predicate("A=5 and (B=3 or B=4)");
  CHECK(e.kind == PredicateExpr::Kind::and_);
  REQUIRE(e.children.size() == 2);
  CHECK(e.children[1].kind == PredicateExpr::Kind::or_);
  auto in = parse_predicate("R.C in (1,2,'x')");
  CHECK(in.kind == PredicateExpr::Kind::in);
  CHECK(in.relation == "R");
  CHECK(in.values.size() == 3);
  CHECK(parse_predicate("").kind == PredicateExpr::Kind::none);
  CHECK_THROWS_AS(parse_predicate("A=5 and"), ParseError);
  CHECK_THROWS_AS(parse_predicate("(A=5"), ParseError);
}

TEST_CASE("statistic selection") {
  StatisticsCatalog c;
  const std::vector<std::string> cond{"X"}, target{"Y"};
  for (double p : {1.0, 0.5}) {
    c.add(StatEntry{"R", cond, target, NormOrder(p), 20, {}, {}});
    c.add(StatEntry{"R", cond, target, NormOrder(p), 5, StatCondition::mcv("A", std::int64_t{1}), {}});
    c.add(StatEntry{"R", cond, target, NormOrder(p), 7, StatCondition::mcv("B", std::int64_t{2}), {}});
    c.add(StatEntry{"R", cond, target, NormOrder(p), 9, StatCondition::common("A"), {}});
  }
  const NormOrder one(1);
  CHECK(select_stat(c, "R", cond, target, one, {}) == 20);
  CHECK(select_stat(c, "R", cond, target, one, parse_predicate("A=1 and B=2")) == 5);
  CHECK(select_stat(c, "R", cond, target, one, parse_predicate("A=1 or B=2")) == 12);
  CHECK(select_stat(c, "R", cond, target, one, parse_predicate("A=3")) == 9);
  CHECK(select_stat(c, "R", cond, target, one, parse_predicate("A in (1,3)")) == 14);
  CHECK(select_stat(c, "R", cond, target, one, parse_predicate("S.A=1")) == 20);
  CHECK(select_stat(c, "R", cond, target, one, parse_predicate("B=4")) == 20);
  CHECK_THROWS_AS(select_stat(c, "R", cond, target, NormOrder(0.5), parse_predicate("A=1 or B=2")), StatisticsError);
  CHECK(select_stat(c, "R", cond, target, NormOrder(0.5), parse_predicate("A=1 and B=2")) == 5);
  CHECK_THROWS_AS(select_stat(c, "R", cond, target, NormOrder(2), {}), StatisticsError);

  SUBCASE("and is below and or above every child") {
    for (const char* text : {"A=1", "A=3", "B=2", "B=9"}) {
      const double child = select_stat(c, "R", cond, target, one, parse_predicate(text));
      CHECK(select_stat(c, "R", cond, target, one, parse_predicate(std::string(text) + " and A=1")) <= child);
      CHECK(select_stat(c, "R", cond, target, one, parse_predicate(std::string(text) + " or A=3")) >= child);
    }
  }
}

TEST_CASE("bucket selection") {
  StatisticsCatalog c;
  c.add(StatEntry{"R", {}, {"Y"}, NormOrder(1), 30, {}, {}});
  c.add(StatEntry{"R", {}, {"Y"}, NormOrder(1), 4, StatCondition::bucket("A", std::int64_t{1}, std::int64_t{5}), 11.0});
  c.add(StatEntry{"R", {}, {"Y"}, NormOrder(1), 6, StatCondition::bucket("A", std::int64_t{6}, std::int64_t{9}), 14.0});
  CHECK(select_stat(c, "R", {}, {"Y"}, NormOrder(1), parse_predicate("A=3")) == 4);
  CHECK(select_stat(c, "R", {}, {"Y"}, NormOrder(1), parse_predicate("A=7")) == 6);
  CHECK(select_stat(c, "R", {}, {"Y"}, NormOrder(1), parse_predicate("A=70")) == 30);
}

#include <doctest.h>

#include <cmath>

#include "pce/cover_bounds.hpp"
#include "pce/dsb.hpp"
#include "pce/error.hpp"
#include "pce/estimate.hpp"
#include "pce/oracle.hpp"
#include "pce/polymatroid.hpp"
#include "pce/random_instance.hpp"
#include "support.hpp"

using namespace pce;
using test::close;

namespace {

VarSet vs(std::initializer_list<int> v) { return VarSet::of(std::vector<int>(v)); }

CoverStatistic stat(int atom, VarSet cond, VarSet target, double value) {
  return {atom, cond, target, std::log(value)};
}

}  // namespace

TEST_CASE("AGM bound") {
  auto c3 = parse_query("C3(X,Y,Z) :- R(X,Y), S(Y,Z), T(Z,X).");
  auto r = agm_bound(c3, std::vector<double>{4, 4, 4});
  CHECK(close(r.bound, 8));
  const auto& w = std::get<EdgeCoverWitness>(r.witness).weights;
  for (double x : w) CHECK(x == doctest::Approx(0.5));

  // Brute-force triangle count on the complete instance over {0,1}.
  int triangles = 0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) ++triangles;
  CHECK(close(r.bound, triangles));

  auto j2 = parse_query("J(X,Y,Z) :- R(X,Y), S(Y,Z).");
  CHECK(close(agm_bound(j2, std::vector<double>{30, 40}).bound, 1200));
  auto single = parse_query("Q(X,Y) :- R(X,Y).");
  CHECK(close(agm_bound(single, std::vector<double>{17}).bound, 17));
  CHECK(agm_bound(j2, std::vector<double>{0, 40}).bound == 0);
  CHECK_THROWS_AS(agm_bound(j2, std::vector<double>{30}), StatisticsError);
}

TEST_CASE("chain bound") {
  auto j2 = parse_query("J(X,Y,Z) :- R(X,Y), S(Y,Z).");
  const VarSet x = vs({0}), y = vs({1}), z = vs({2});
  const double r = 100, s = 60;

  SUBCASE("cardinalities alone give AGM") {
    std::vector<CoverStatistic> st{stat(0, {}, x | y, r), stat(1, {}, y | z, s)};
    CHECK(close(chain_bound(j2, st).log_bound, agm_bound(j2, std::vector<double>{r, s}).log_bound));
  }
  SUBCASE("a max degree on either side") {
    for (double a : {1.0, 3.0, 50.0})
      for (double b : {1.0, 2.0, 80.0}) {
        std::vector<CoverStatistic> st{stat(0, {}, x | y, r), stat(1, {}, y | z, s), stat(0, y, x, a),
                                       stat(1, y, z, b)};
        CHECK(close(chain_bound(j2, st).bound, std::min({r * b, a * s, r * s})));
      }
  }
  SUBCASE("a key join collapses to |R|") {
    std::vector<CoverStatistic> st{stat(0, {}, x | y, r), stat(1, {}, y | z, s), stat(1, y, z, 1)};
    CHECK(close(chain_bound(j2, st).bound, r));
  }
  SUBCASE("errors") {
    std::vector<CoverStatistic> st{stat(0, {}, x | y, r)};
    CHECK_THROWS_AS(chain_bound(j2, st), StatisticsError);
    std::vector<CoverStatistic> ok{stat(0, {}, x | y, r), stat(1, {}, y | z, s)};
    CHECK_THROWS_AS(chain_bound(j2, ok, 2), StatisticsError);
  }
}

TEST_CASE("bound sketch on the three-way path") {
  auto j3 = parse_query("J3(X,Y,Z,U) :- R(X,Y), S(Y,Z), T(Z,U).");
  const VarSet x = vs({0}), y = vs({1}), z = vs({2}), u = vs({3});
  std::vector<CoverStatistic> st{stat(0, {}, x | y, 100), stat(1, y, z, 3), stat(2, z, u, 5), stat(2, {}, z | u, 40),
                                 stat(0, y, x, 2),        stat(1, {}, y | z, 60), stat(1, z, y, 4)};
  const double expected = std::min({100.0 * 3 * 5, 2.0 * 60 * 5, 2.0 * 4 * 40, 100.0 * 40});
  CHECK(expected == 320);
  auto r = bound_sketch(j3, st);
  CHECK(close(r.bound, expected));
  CHECK(close(witness_log_value(r, st), r.log_bound));
  CHECK(r.log_bound >= chain_bound(j3, st).log_bound - 1e-9);

  SUBCASE("cardinalities only") {
    auto j2 = parse_query("J(X,Y,Z) :- R(X,Y), S(Y,Z).");
    std::vector<CoverStatistic> cards{stat(0, {}, vs({0, 1}), 7), stat(1, {}, vs({1, 2}), 9)};
    CHECK(close(bound_sketch(j2, cards).bound, 63));
  }
  SUBCASE("a key on the far side") {
    auto j2 = parse_query("J(X,Y,Z) :- R(X,Y), S(Y,Z).");
    std::vector<CoverStatistic> key{stat(0, {}, vs({0, 1}), 7), stat(1, vs({1}), vs({2}), 1)};
    CHECK(close(bound_sketch(j2, key).bound, 7));
  }
  SUBCASE("one statistic covering everything") {
    auto q = parse_query("Q(X,Y,Z) :- R(X,Y,Z), S(Y,Z).");
    std::vector<CoverStatistic> all{stat(1, {}, vs({1, 2}), 5), stat(0, {}, vs({0, 1, 2}), 12)};
    auto r = bound_sketch(q, all);
    CHECK(close(r.bound, 12));
    CHECK(std::get<PathWitness>(r.witness).steps == std::vector<int>{1});
  }
  SUBCASE("unreachable") {
    std::vector<CoverStatistic> part{stat(0, {}, x | y, 100)};
    CHECK_THROWS_AS(bound_sketch(j3, part), StatisticsError);
  }
}

TEST_CASE("acyclic chain bound") {
  auto j3 = parse_query("J3(X,Y,Z,U) :- R(X,Y), S(Y,Z), T(Z,U).");
  const VarSet x = vs({0}), y = vs({1}), z = vs({2}), u = vs({3});
  std::vector<CoverStatistic> st{stat(0, {}, x | y, 100), stat(1, y, z, 3), stat(2, z, u, 5)};
  auto r = acyclic_chain_bound(j3, st);
  REQUIRE(r);
  CHECK(close(r->bound, 100.0 * 3 * 5));
  CHECK(std::get<OrderedCoverWitness>(r->witness).order == std::vector<int>{0, 1, 2, 3});

  auto j2 = parse_query("Q(X,Y) :- R(X,Y).");
  std::vector<CoverStatistic> cyclic{stat(0, vs({1}), vs({0}), 2), stat(0, vs({0}), vs({1}), 2)};
  CHECK_FALSE(acyclic_chain_bound(j2, cyclic));

  auto c3 = parse_query("C3(X,Y,Z) :- R(X,Y), S(Y,Z), T(Z,X).");
  std::vector<CoverStatistic> cards{stat(0, {}, vs({0, 1}), 4), stat(1, {}, vs({1, 2}), 9), stat(2, {}, vs({0, 2}), 16)};
  CHECK(close(acyclic_chain_bound(c3, cards)->log_bound, agm_bound(c3, std::vector<double>{4, 9, 16}).log_bound));
}

TEST_CASE("cover witnesses re-evaluate and cover every variable") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto inst = random_instance(seed);
    const NormOrder inf = NormOrder::infinity();
    auto stats = exact_atom_statistics(inst.db, inst.query, std::span<const NormOrder>(&inf, 1));
    auto cover = cover_statistics(stats);
    auto cb = chain_bound(inst.query, cover);
    auto bs = bound_sketch(inst.query, cover);
    for (const auto* r : {&cb, &bs})
      if (!std::isinf(r->log_bound)) CHECK(close(witness_log_value(*r, cover), r->log_bound));
    if (const auto* w = std::get_if<OrderedCoverWitness>(&cb.witness))
      CHECK(ordered_cover_holds(*w, cover, inst.query.num_vars()));
  }
}

TEST_CASE("elemental inequality counts") {
  auto formula = [](int n) { return n + ((n * (n - 1)) << n) / 8; };
  CHECK(elemental_inequalities(1).size() == 1);
  CHECK(elemental_inequalities(2).size() == 3);
  CHECK(elemental_inequalities(3).size() == 9);
  CHECK(elemental_inequalities(4).size() == 28);
  CHECK(elemental_inequalities(5).size() == 85);
  for (int n = 1; n <= 10; ++n) CHECK(static_cast<int>(elemental_inequalities(n).size()) == formula(n));
  CHECK(&elemental_inequalities(4) == &elemental_inequalities(4));
  CHECK_THROWS_AS(elemental_inequalities(0), InputError);
  CHECK_THROWS_AS(elemental_inequalities(15), InputError);
}

TEST_CASE("polymatroid bound") {
  SUBCASE("two-way join with l2 norms") {
    auto j2 = parse_query("J(X,Y,Z) :- R(X,Y), S(Y,Z).");
    const double l2 = std::log(std::sqrt(18.0));
    std::vector<NormConstraint> c{{vs({1}), vs({0}), NormOrder(2), l2}, {vs({1}), vs({2}), NormOrder(2), l2}};
    CHECK(close(polyb(j2, c).bound, 18, 1e-8));
  }
  SUBCASE("triangle with cardinalities") {
    auto c3 = parse_query("C3(X,Y,Z) :- R(X,Y), S(Y,Z), T(Z,X).");
    std::vector<NormConstraint> c{{{}, vs({0, 1}), NormOrder(1), std::log(4.0)},
                                  {{}, vs({1, 2}), NormOrder(1), std::log(4.0)},
                                  {{}, vs({0, 2}), NormOrder(1), std::log(4.0)}};
    CHECK(close(polyb(c3, c).bound, 8, 1e-8));
  }
  SUBCASE("unbounded and zero") {
    CHECK_THROWS_AS(polyb(1, {}, VarSet::first(1)), StatisticsError);
    std::vector<NormConstraint> zero{{{}, vs({0}), NormOrder(1), -INFINITY}};
    CHECK(polyb(1, zero, VarSet::first(1)).bound == 0);
  }
  SUBCASE("group-by objective") {
    auto j2 = parse_query("J(X,Z) :- R(X,Y), S(Y,Z).");
    std::vector<NormConstraint> c{{{}, vs({0}), NormOrder(1), std::log(5.0)},
                                  {{}, vs({2}), NormOrder(1), std::log(7.0)},
                                  {{}, vs({0, 1}), NormOrder(1), std::log(100.0)},
                                  {{}, vs({1, 2}), NormOrder(1), std::log(100.0)}};
    CHECK(close(polyb(j2, c, j2.head_vars()).bound, 35, 1e-8));
    CHECK(polyb(j2, c).bound > 35);
  }
  SUBCASE("the optimum is a polymatroid") {
    auto c3 = parse_query("C3(X,Y,Z) :- R(X,Y), S(Y,Z), T(Z,X).");
    std::vector<NormConstraint> c{{{}, vs({0, 1}), NormOrder(1), std::log(10.0)},
                                  {vs({1}), vs({2}), NormOrder(2), std::log(6.0)},
                                  {vs({2}), vs({0}), NormOrder::infinity(), std::log(3.0)}};
    auto r = polyb(c3, c);
    EntropyVector h(3);
    h.values = std::get<EntropyWitness>(r.witness).h;
    for (const auto& e : elemental_inequalities(3)) CHECK(e.evaluate(h) >= -1e-9);
    for (const auto& k : c) CHECK(k.slack(h) >= -1e-9);
    CHECK(close(h(c3.all_vars()), r.log_bound));
  }
}

TEST_CASE("dropping non-join variables") {
  auto q = parse_query("Q(X,Y,Z,U,V,W,K,L) :- R(X,Y,Z,U,V), S(V,W,K,L).");
  auto red = drop_nonjoin_vars(q);
  CHECK(to_string(red.reduced) == "Q(X,V,W) :- R(X,V), S(V,W).");
  CHECK(red.map(vs({1, 2, 3})) == vs({0}));

  auto c3 = parse_query("C3(X,Y,Z) :- R(X,Y), S(Y,Z), T(Z,X).");
  CHECK(to_string(drop_nonjoin_vars(c3).reduced) == to_string(c3));

  auto single = parse_query("Q(X,Y,Z) :- R(X,Y,Z).");
  auto one = drop_nonjoin_vars(single);
  CHECK(one.reduced.num_vars() == 1);
  std::vector<NormConstraint> c{{{}, VarSet::first(3), NormOrder(1), std::log(8.0)}};
  std::vector<NormConstraint> mapped{one.map(c[0])};
  CHECK(reduction_is_exact(one, c));
  CHECK(close(polyb(single, c).log_bound, polyb(one.reduced, mapped).log_bound));

  SUBCASE("the reduced LP has the same optimum") {
    const VarSet r_priv = vs({1, 2, 3}) | vs({0}), s_priv = vs({5, 6, 7});
    const VarSet v = vs({4});
    std::vector<NormConstraint> st{{{}, r_priv | v, NormOrder(1), std::log(50.0)},
                                   {{}, v | s_priv, NormOrder(1), std::log(40.0)},
                                   {v, r_priv, NormOrder(2), std::log(9.0)},
                                   {v, s_priv, NormOrder::infinity(), std::log(3.0)},
                                   {{}, v, NormOrder(1), std::log(6.0)}};
    // R's private group is {X,Y,Z,U}, fused into one; every statistic uses it whole.
    CHECK(reduction_is_exact(red, st));
    std::vector<NormConstraint> m;
    for (const auto& k : st) m.push_back(red.map(k));
    CHECK(close(polyb(q, st).log_bound, polyb(red.reduced, m).log_bound, 1e-9));
  }
  SUBCASE("statistics splitting a group are detected") {
    std::vector<NormConstraint> split{{{}, vs({0}), NormOrder(1), 1.0}};
    CHECK_FALSE(reduction_is_exact(red, split));
  }
}

TEST_CASE("degree sequence bound") {
  auto ds = [](std::vector<std::int64_t> d) { return DegreeSequence{"R", {}, {}, std::move(d)}; };
  CHECK(dsb_join_bound(ds({3, 2, 1}), ds({2, 2})).bound == doctest::Approx(10));
  CHECK(dsb_join_bound(ds({4, 2, 2, 1, 1, 1}), ds({4, 2, 2, 1, 1, 1})).bound == doctest::Approx(27));
  CHECK(dsb_join_bound(ds({5, 3, 3}), ds({1, 1, 1, 1})).bound == doctest::Approx(11));

  SUBCASE("run-aligned evaluation matches expansion") {
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
      auto a = cdf_upper_compress(ds(random_degrees(rng, static_cast<int>(rng.uniform(1, 30)), 9)),
                                  static_cast<int>(rng.uniform(1, 5)));
      auto b = run_length_compress(ds(random_degrees(rng, static_cast<int>(rng.uniform(1, 30)), 9)));
      CHECK(rank_product_sum(a, b) == doctest::Approx(rank_product_sum(a.expand(), b.expand())));
    }
  }
  SUBCASE("compressed left side") {
    const auto a = ds({4, 2, 2, 1, 1, 1});
    CompressedDegreeSequence hand{{{4, 1}, {3.5, 2}, {0, 3}}, false};
    auto r = dsb_join_bound_compressed(a, hand, ds({2, 1, 1, 1, 1, 1}));
    CHECK(r.bound == doctest::Approx(15));
    CHECK(dsb_join_bound(a, ds({2, 1, 1, 1, 1, 1})).bound == doctest::Approx(15));
    CHECK(dsb_join_bound_compressed(a, run_length_compress(a), ds({3, 1})).bound ==
          doctest::Approx(dsb_join_bound(a, ds({3, 1})).bound));
    auto flat = dsb_join_bound_compressed(a, hand, ds({1, 1, 1, 1, 1, 1}));
    CHECK(flat.bound >= 11);
    CHECK(flat.bound == doctest::Approx(hand.cdf().back()));
    CompressedDegreeSequence bad{{{1, 6}}, false};
    CHECK_THROWS_AS(dsb_join_bound_compressed(a, bad, ds({1})), StatisticsError);
  }
  SUBCASE("exact when every value has the same rank on both sides") {
    // R and S agree on the rank of every join value: 1 has degree 3, 2 has 2, 3 has 1.
    Database db;
    db.add(test::pairs("R", {{10, 1}, {11, 1}, {12, 1}, {10, 2}, {11, 2}, {10, 3}}));
    db.add(test::pairs("S", {{1, 5}, {1, 6}, {1, 7}, {2, 5}, {2, 6}, {3, 5}}));
    auto q = parse_query("J(X,Y,Z) :- R(X,Y), S(Y,Z).");
    const auto count = exact_join(db, q).count;
    CHECK(count == 14);
    CHECK(dsb_join_bound(ds({3, 2, 1}), ds({3, 2, 1})).bound == doctest::Approx(count));
  }
}

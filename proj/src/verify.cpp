#include "pce/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "pce/dsb.hpp"
#include "pce/error.hpp"
#include "pce/estimate.hpp"
#include "pce/format.hpp"
#include "pce/oracle.hpp"
#include "pce/random_instance.hpp"
#include "pce/stats.hpp"

namespace pce {

namespace {

constexpr std::size_t kMaxRecordedFailures = 10;
constexpr double kSoundTol = 1e-9;
constexpr double kDominanceTol = 1e-6;

/// a <= b in log space, relative tolerance; -inf only fits under -inf.
bool log_le(double a, double b, double tol) {
  if (std::isinf(b) && b < 0) return std::isinf(a) && a < 0;
  if (std::isinf(a) && a < 0) return true;
  return a <= b + tol * std::max(1.0, std::abs(b));
}

bool log_eq(double a, double b, double tol) { return log_le(a, b, tol) && log_le(b, a, tol); }

double log_count(std::int64_t n) {
  return n == 0 ? -std::numeric_limits<double>::infinity() : std::log(static_cast<double>(n));
}

std::string where(const char* what, std::uint64_t seed) {
  return std::string(what) + " (seed " + std::to_string(seed) + ")";
}

std::vector<std::string> attrs_for(const Relation& r, const Atom& atom, VarSet vars) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < atom.args.size(); ++k)
    if (vars.contains(atom.args[k])) out.push_back(r.attributes()[k]);
  return out;
}

/// deg(*|Y) for each atom of a two-atom query, Y the shared variables.
std::pair<DegreeSequence, DegreeSequence> join_sequences(const Database& db, const ConjunctiveQuery& q) {
  const auto& a0 = q.atoms()[0];
  const auto& a1 = q.atoms()[1];
  const VarSet y = a0.vars() & a1.vars();
  auto seq = [&](const Atom& a) {
    const Relation& r = db.at(a.relation);
    return degree_sequence(r, attrs_for(r, a, y), attrs_for(r, a, a.vars() - y));
  };
  return {seq(a0), seq(a1)};
}

std::vector<Tuple> project_rows(const std::vector<Tuple>& rows, VarSet vars) { return project(rows, vars.members()); }

}  // namespace

void CheckResult::record(bool ok, const std::string& what) {
  ++checks;
  if (ok) return;
  ++violations;
  if (failures.size() < kMaxRecordedFailures) failures.push_back(what);
}

CheckResult check_soundness(std::uint64_t seed, int trials) {
  CheckResult res;
  res.name = "soundness";
  const auto ps = default_norm_orders();
  for (int t = 0; t < trials; ++t, ++res.trials) {
    const std::uint64_t s = seed + t;
    auto inst = random_instance(s);
    const auto& q = inst.query;
    auto exact = exact_join(inst.db, q, kDefaultOracleCap, true);
    const double truth = log_count(exact.count);
    auto stats = exact_atom_statistics(inst.db, q, ps);
    const auto cover = cover_statistics(stats);

    std::optional<JoinSequences> join;
    std::optional<std::pair<DegreeSequence, DegreeSequence>> seqs;
    if (q.atoms().size() == 2) {
      seqs = join_sequences(inst.db, q);
      join = JoinSequences{run_length_compress(seqs->first), run_length_compress(seqs->second)};
    }
    auto outcomes = run_methods(q, stats, kAllMethods, {}, join);
    for (const auto& o : outcomes) {
      if (o.status == MethodOutcome::Status::unavailable) continue;
      const std::string name = to_string(o.method);
      if (o.status == MethodOutcome::Status::failed) {
        res.record(false, where((name + " failed: " + o.reason).c_str(), s));
        continue;
      }
      res.record(log_le(truth, o.result.log_bound, kSoundTol), where((name + " below exact size").c_str(), s));
      if (o.method == Method::cb || o.method == Method::boundsketch) {
        const double again = witness_log_value(o.result, cover);
        res.record(std::isinf(o.result.log_bound) || std::abs(again - o.result.log_bound) <=
                                                         1e-9 * std::max(1.0, std::abs(o.result.log_bound)),
                   where((name + " witness does not reproduce the bound").c_str(), s));
      }
      if (const auto* w = std::get_if<OrderedCoverWitness>(&o.result.witness))
        res.record(ordered_cover_holds(*w, cover, q.num_vars()), where("cb witness is not a cover", s));
    }

    if (seqs) {
      Rng rng(s);
      const int ka = static_cast<int>(rng.uniform(1, 3)), kb = static_cast<int>(rng.uniform(1, 3));
      auto lossy = dsb_join_bound(cdf_upper_compress(seqs->first, ka), cdf_upper_compress(seqs->second, kb));
      res.record(log_le(truth, lossy.log_bound, kSoundTol), where("compressed dsb below exact size", s));
      auto one_sided = dsb_join_bound_compressed(seqs->first, cdf_upper_compress(seqs->first, ka), seqs->second);
      res.record(log_le(truth, one_sided.log_bound, kSoundTol), where("one-sided compressed dsb below exact size", s));
    }

    if (exact.count > 0) {
      const VarSet objective = q.atoms()[0].vars();
      auto grouped = polyb(q, norm_constraints(stats), objective);
      const auto distinct = static_cast<std::int64_t>(project_rows(exact.rows, objective).size());
      res.record(log_le(log_count(distinct), grouped.log_bound, kSoundTol), where("group-by polyb below projection", s));
    }
  }
  return res;
}

CheckResult check_dominance(std::uint64_t seed, int trials) {
  CheckResult res;
  res.name = "dominance";
  const NormOrder inf = NormOrder::infinity();
  for (int t = 0; t < trials; ++t, ++res.trials) {
    const std::uint64_t s = seed + t;
    auto inst = random_instance(s);
    const auto& q = inst.query;
    auto stats = exact_atom_statistics(inst.db, q, std::span<const NormOrder>(&inf, 1));
    const auto cover = cover_statistics(stats);
    const double agm = agm_bound(q, atom_cardinalities(q, stats)).log_bound;
    const double cb = chain_bound(q, cover).log_bound;
    const double bs = bound_sketch(q, cover).log_bound;
    const double pb = polyb(q, norm_constraints(stats)).log_bound;
    res.record(log_le(pb, cb, kDominanceTol), where("polyb > cb", s));
    res.record(log_le(cb, bs, kDominanceTol), where("cb > boundsketch", s));
    res.record(log_le(cb, agm, kDominanceTol), where("cb > agm", s));
    if (auto acyclic = acyclic_chain_bound(q, cover))
      res.record(log_eq(acyclic->log_bound, cb, kDominanceTol), where("acyclic cb differs from cb", s));

    std::vector<CoverStatistic> cards;
    for (const auto& c : cover)
      if (c.cond.empty() && c.target == q.atoms()[c.atom].vars()) cards.push_back(c);
    res.record(log_eq(chain_bound(q, cards).log_bound, agm, kDominanceTol), where("cardinality-only cb != agm", s));
  }
  return res;
}

CheckResult check_entropy(std::uint64_t seed, int trials) {
  CheckResult res;
  res.name = "entropy";
  const std::vector<NormOrder> ps{NormOrder(1), NormOrder(2), NormOrder(3), NormOrder::infinity()};
  for (int t = 0; t < trials; ++t, ++res.trials) {
    // Entropy needs a non-empty output; redraw deterministically until one appears.
    std::optional<RandomInstance> inst;
    JoinResult out;
    std::uint64_t s = seed + t;
    for (std::uint64_t k = 0; k < 64; ++k) {
      s = (seed + t) ^ (k << 40);
      inst = random_instance(s);
      out = exact_join(inst->db, inst->query, kDefaultOracleCap, true);
      if (out.count > 0) break;
    }
    if (out.count == 0) continue;
    const auto& q = inst->query;
    auto h = empirical_entropy(out.rows, q.num_vars());
    res.record(h(q.all_vars()) == std::log(static_cast<double>(out.count)), where("h(all) != log |Q|", s));
    for (const auto& e : elemental_inequalities(q.num_vars()))
      res.record(e.evaluate(h) >= -1e-9, where("elemental inequality violated", s));
    for (const auto& st : exact_atom_statistics(inst->db, q, ps)) {
      auto check = verify_norm_constraint(h, NormConstraint{st.cond, st.target, st.p, st.log_norm});
      res.record(check.holds, where(("norm constraint p=" + to_string(st.p) + " slack " + significant(check.slack)).c_str(), s));
    }
  }
  return res;
}

CheckResult check_closed_forms(std::uint64_t seed, int trials) {
  CheckResult res;
  res.name = "closed-forms";
  for (int t = 0; t < trials; ++t, ++res.trials) {
    const std::uint64_t s = seed + t;
    auto db = random_rst(s);
    for (auto f : kAllFamilies)
      for (const auto& c : verify_inequalities(db, f).checks)
        res.record(c.pass, where((c.name + " lhs " + significant(c.lhs) + " rhs " + significant(c.rhs)).c_str(), s));
  }
  return res;
}

namespace {

/// A nonnegative sequence whose prefix sums dominate those of `a`: mass moves
/// towards the front and extra mass is added.
std::vector<double> dominating(Rng& rng, const std::vector<double>& a) {
  std::vector<double> out = a;
  const int n = static_cast<int>(out.size());
  const int moves = static_cast<int>(rng.uniform(0, 2 * n));
  for (int k = 0; k < moves && n > 1; ++k) {
    const auto j = rng.uniform(1, n - 1);
    const auto i = rng.uniform(0, j - 1);
    const double amount = out[j] * rng.unit();
    out[j] -= amount;
    out[i] += amount;
  }
  for (auto& x : out)
    if (rng.chance(0.3)) x += 3 * rng.unit();
  return out;
}

std::vector<double> to_doubles(const std::vector<std::int64_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

CheckResult check_compression(std::uint64_t seed, int trials) {
  CheckResult res;
  res.name = "compression";
  for (int t = 0; t < trials; ++t, ++res.trials) {
    const std::uint64_t s = seed + t;
    Rng rng(s);
    const int n = static_cast<int>(rng.uniform(1, 30));
    const auto a = to_doubles(random_degrees(rng, n, 10));
    std::vector<double> b(n);
    for (auto& x : b) x = rng.chance(0.1) ? 0.0 : 10 * rng.unit();
    std::sort(b.begin(), b.end(), std::greater<>());

    const auto a2 = dominating(rng, a);
    CompressedDegreeSequence a2_runs;
    for (double x : a2) a2_runs.runs.push_back({x, 1});
    res.record(cdf_dominates(a2_runs, a), where("generated sequence does not dominate", s));
    const double lhs = rank_product_sum(a2, b), rhs = rank_product_sum(a, b);
    res.record(lhs >= rhs - 1e-9 * std::max(1.0, rhs), where("sum a''b < sum ab", s));

    DegreeSequence ds{"R", {}, {}, random_degrees(rng, static_cast<int>(rng.uniform(1, 40)), 12)};
    const int max_runs = static_cast<int>(rng.uniform(1, 6));
    auto c = cdf_upper_compress(ds, max_runs);
    const auto orig = to_doubles(ds.degrees);
    res.record(static_cast<int>(c.runs.size()) <= max_runs, where("too many runs", s));
    res.record(c.length() == static_cast<std::int64_t>(ds.length()), where("length changed", s));
    res.record(cdf_dominates(c, orig), where("compressed CDF below original", s));
    res.record(c.runs.front().value >= orig.front(), where("first entry below d1", s));
    res.record(c.non_increasing(), where("compressed sequence increases", s));
    std::vector<double> bb(ds.length());
    for (auto& x : bb) x = 10 * rng.unit();
    std::sort(bb.begin(), bb.end(), std::greater<>());
    const double cl = rank_product_sum(c.expand(), bb), cr = rank_product_sum(orig, bb);
    res.record(cl >= cr - 1e-9 * std::max(1.0, cr), where("compressed dsb below exact dsb", s));
  }
  return res;
}

CheckResult check_dsb_improvement(std::uint64_t seed, int trials) {
  CheckResult res;
  res.name = "dsb-improvement";
  auto sum_ab = [](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) s += a[i] * b[i];
    return s;
  };
  auto l1 = [](const std::vector<std::int64_t>& v) { return std::accumulate(v.begin(), v.end(), std::int64_t{0}); };
  auto constant = [](const std::vector<std::int64_t>& v) { return v.front() == v.back(); };
  const auto join = parse_query("J(X,Y,Z) :- R(X,Y), S(Y,Z).");

  for (int t = 0; t < trials; ++t, ++res.trials) {
    const std::uint64_t s = seed + t;
    Rng rng(s);
    const int n = static_cast<int>(rng.uniform(1, 30));
    for (int m : {n, static_cast<int>(rng.uniform(1, 30))}) {
      const auto a = random_degrees(rng, n, 20), b = random_degrees(rng, m, 20);
      const std::int64_t sum = sum_ab(a, b), naive = std::min(a.front() * l1(b), l1(a) * b.front());
      res.record(sum <= naive, where("sum ab above the naive bound", s));
      if (m == n && !constant(a) && !constant(b))
        res.record(sum < naive, where("sum ab not strictly below the naive bound", s));
    }

    Database db;
    db.add(random_relation(rng, "R", 2, static_cast<int>(rng.uniform(1, 50)), static_cast<int>(rng.uniform(2, 8))));
    db.add(random_relation(rng, "S", 2, static_cast<int>(rng.uniform(1, 50)), static_cast<int>(rng.uniform(2, 8))));
    const auto count = exact_join(db, join).count;
    auto [da, db_] = join_sequences(db, join);
    res.record(log_le(log_count(count), dsb_join_bound(da, db_).log_bound, kSoundTol),
               where("dsb below exact join size", s));
  }
  return res;
}

CheckResult check_statistic_monotonicity(std::uint64_t seed, int trials) {
  CheckResult res;
  res.name = "monotonicity";
  const auto ps = default_norm_orders();
  for (int t = 0; t < trials; ++t, ++res.trials) {
    const std::uint64_t s = seed + t;
    auto inst = random_instance(s);
    const auto& q = inst.query;
    auto all = exact_atom_statistics(inst.db, q, ps);
    Rng rng(s ^ 0x9e3779b97f4a7c15ULL);
    std::vector<AtomStatistic> base, rest;
    for (const auto& st : all) {
      const bool card = st.cond.empty() && st.target == q.atoms()[st.atom].vars() && st.p.value() == 1.0;
      (card || rng.chance(0.3) ? base : rest).push_back(st);
    }
    if (rest.empty()) continue;
    const double before = polyb(q, norm_constraints(base)).log_bound;
    base.push_back(rest[rng.uniform(0, static_cast<std::int64_t>(rest.size()) - 1)]);
    const double after = polyb(q, norm_constraints(base)).log_bound;
    res.record(log_le(after, before, 1e-9), where("extra statistic raised polyb", s));
  }
  return res;
}

CheckResult check_database(const Database& db) {
  CheckResult res;
  res.name = "fixtures";
  for (const auto& [name, r] : db.relations) {
    ++res.trials;
    if (r.empty() || r.arity() > 8) continue;
    const std::uint32_t all = (1u << r.arity()) - 1;
    for (std::uint32_t u = 0; u <= all; ++u) {
      const std::uint32_t rest = all & ~u;
      for (std::uint32_t v = rest; v != 0; v = (v - 1) & rest) {
        std::vector<std::string> cond, target;
        for (int k = 0; k < r.arity(); ++k) {
          if (u >> k & 1u) cond.push_back(r.attributes()[k]);
          if (v >> k & 1u) target.push_back(r.attributes()[k]);
        }
        for (NormOrder p : default_norm_orders()) {
          auto c = verify_norm_constraint(r, cond, target, p);
          res.record(c.holds, name + ": norm constraint p=" + to_string(p) + " slack " + significant(c.slack));
        }
      }
    }
  }
  auto binary = [&](const char* n) {
    auto it = db.relations.find(n);
    return it != db.relations.end() && it->second.arity() == 2;
  };
  if (binary("R") && binary("S") && binary("T")) {
    for (auto f : kAllFamilies)
      for (const auto& c : verify_inequalities(db, f).checks)
        res.record(c.pass, c.name + " lhs " + significant(c.lhs) + " rhs " + significant(c.rhs));
  }
  return res;
}

std::string to_string(Suite s) {
  switch (s) {
    case Suite::soundness: return "soundness";
    case Suite::dominance: return "dominance";
    case Suite::shannon: return "shannon";
    case Suite::compression: return "compression";
    case Suite::all: return "all";
  }
  return "?";
}

Suite parse_suite(const std::string& text) {
  for (auto s : {Suite::soundness, Suite::dominance, Suite::shannon, Suite::compression, Suite::all})
    if (to_string(s) == text) return s;
  throw InputError("unknown suite '" + text + "'");
}

std::int64_t VerificationReport::violations() const {
  std::int64_t v = 0;
  for (const auto& c : checks) v += c.violations;
  return v;
}

std::string VerificationReport::text() const {
  std::ostringstream out;
  out << "verification seed=" << seed << " trials=" << trials << "\n";
  char line[128];
  std::snprintf(line, sizeof line, "%-18s %8s %10s %10s\n", "check", "trials", "checks", "violations");
  out << line;
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-18s %8lld %10lld %10lld\n", c.name.c_str(), static_cast<long long>(c.trials),
                  static_cast<long long>(c.checks), static_cast<long long>(c.violations));
    out << line;
    for (const auto& f : c.failures) out << "  - " << f << "\n";
  }
  out << "total violations: " << violations() << "\n";
  return out.str();
}

std::string VerificationReport::json() const {
  nlohmann::ordered_json doc;
  doc["seed"] = seed;
  doc["trials"] = trials;
  doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks)
    doc["checks"].push_back({{"name", c.name},
                             {"trials", c.trials},
                             {"checks", c.checks},
                             {"violations", c.violations},
                             {"failures", c.failures}});
  doc["violations"] = violations();
  return doc.dump(2);
}

VerificationReport run_verification(Suite suite, std::uint64_t seed, int trials, const Database* db) {
  VerificationReport rep{seed, trials, {}};
  auto want = [&](Suite s) { return suite == Suite::all || suite == s; };
  if (want(Suite::soundness)) rep.checks.push_back(check_soundness(seed, trials));
  if (want(Suite::dominance)) {
    rep.checks.push_back(check_dominance(seed, trials));
    rep.checks.push_back(check_statistic_monotonicity(seed, trials));
  }
  if (want(Suite::shannon)) {
    rep.checks.push_back(check_entropy(seed, trials));
    rep.checks.push_back(check_closed_forms(seed, trials));
  }
  if (want(Suite::compression)) {
    rep.checks.push_back(check_compression(seed, trials));
    rep.checks.push_back(check_dsb_improvement(seed, trials));
  }
  if (db) rep.checks.push_back(check_database(*db));
  return rep;
}

}  // namespace pce

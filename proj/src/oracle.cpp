#include "pce/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pce/error.hpp"
#include "pce/format.hpp"
#include "pce/stats.hpp"

namespace pce {

JoinResult exact_join(const Database& db, const ConjunctiveQuery& q, std::int64_t cap, bool keep_rows) {
  const int n = q.num_vars();
  std::vector<Tuple> partial{Tuple(n, Value{std::int64_t{0}})};
  VarSet bound;
  for (const auto& atom : q.atoms()) {
    const Relation& r = db.at(atom.relation);
    if (r.arity() != static_cast<int>(atom.args.size()))
      throw InputError("atom " + atom.relation + " has " + std::to_string(atom.args.size()) +
                       " arguments but the relation has arity " + std::to_string(r.arity()));
    std::vector<int> key_pos, new_pos;
    for (int k = 0; k < r.arity(); ++k) (bound.contains(atom.args[k]) ? key_pos : new_pos).push_back(k);

    std::map<Tuple, std::vector<const Tuple*>> index;
    for (const auto& row : r.rows()) {
      Tuple key;
      for (int k : key_pos) key.push_back(row[k]);
      index[std::move(key)].push_back(&row);
    }

    std::vector<Tuple> next;
    for (const auto& t : partial) {
      Tuple key;
      for (int k : key_pos) key.push_back(t[atom.args[k]]);
      auto it = index.find(key);
      if (it == index.end()) continue;
      for (const Tuple* row : it->second) {
        if (static_cast<std::int64_t>(next.size()) >= cap)
          throw OracleCapExceeded("intermediate result exceeds " + std::to_string(cap) + " tuples");
        Tuple ext = t;
        for (int k : new_pos) ext[atom.args[k]] = (*row)[k];
        next.push_back(std::move(ext));
      }
    }
    partial = std::move(next);
    bound = bound | atom.vars();
  }
  JoinResult out{static_cast<std::int64_t>(partial.size()), {}};
  if (keep_rows) {
    std::sort(partial.begin(), partial.end());
    out.rows = std::move(partial);
  }
  return out;
}

EntropyVector empirical_entropy(const std::vector<Tuple>& rows, int num_vars) {
  if (rows.empty()) throw InputError("entropy of an empty output is undefined");
  if (num_vars < 0 || num_vars > kMaxPolymatroidVars) throw InputError("too many variables for an entropy vector");
  EntropyVector h(num_vars);
  const double n = static_cast<double>(rows.size());
  const std::uint32_t full = VarSet::first(num_vars).bits();
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    if (mask == full) {
      h(VarSet(mask)) = std::log(n);
      continue;
    }
    auto proj = VarSet(mask).members();
    std::vector<Tuple> marginal;
    marginal.reserve(rows.size());
    for (const auto& row : rows) {
      Tuple t;
      for (int v : proj) t.push_back(row[v]);
      marginal.push_back(std::move(t));
    }
    std::sort(marginal.begin(), marginal.end());
    double sum = 0;
    for (std::size_t i = 0; i < marginal.size();) {
      std::size_t j = i + 1;
      while (j < marginal.size() && marginal[j] == marginal[i]) ++j;
      const double c = static_cast<double>(j - i);
      sum += c / n * std::log(n / c);
      i = j;
    }
    h(VarSet(mask)) = sum;
  }
  return h;
}

EntropyVector empirical_entropy(const Database& db, const ConjunctiveQuery& q, std::int64_t cap) {
  auto res = exact_join(db, q, cap, true);
  return empirical_entropy(res.rows, q.num_vars());
}

namespace {

std::vector<std::string> attrs_at(const Relation& r, std::uint32_t positions) {
  std::vector<std::string> out;
  for (int k = 0; k < r.arity(); ++k)
    if (positions >> k & 1u) out.push_back(r.attributes()[k]);
  return out;
}

VarSet vars_at(const Atom& a, std::uint32_t positions) {
  VarSet out;
  for (std::size_t k = 0; k < a.args.size(); ++k)
    if (positions >> k & 1u) out = out.with(a.args[k]);
  return out;
}

}  // namespace

std::vector<AtomStatistic> exact_atom_statistics(const Database& db, const ConjunctiveQuery& q,
                                                 std::span<const NormOrder> ps) {
  std::vector<AtomStatistic> out;
  for (std::size_t j = 0; j < q.atoms().size(); ++j) {
    const auto& atom = q.atoms()[j];
    const Relation& r = db.at(atom.relation);
    if (r.arity() != static_cast<int>(atom.args.size()))
      throw InputError("arity mismatch for atom " + atom.relation);
    const std::uint32_t all = (1u << r.arity()) - 1;
    for (std::uint32_t u = 0; u <= all; ++u) {
      const std::uint32_t rest = all & ~u;
      for (std::uint32_t v = rest; v != 0; v = (v - 1) & rest) {
        auto ds = degree_sequence(r, attrs_at(r, u), attrs_at(r, v));
        for (NormOrder p : ps)
          out.push_back({static_cast<int>(j), vars_at(atom, u), vars_at(atom, v), p, log_lp_norm(ds, p)});
      }
    }
  }
  return out;
}

NormCheck verify_norm_constraint(const EntropyVector& h, const NormConstraint& c, double tolerance) {
  const double slack = c.slack(h);
  return {slack >= -tolerance, slack};
}

NormCheck verify_norm_constraint(const Relation& r, const std::vector<std::string>& cond,
                                 const std::vector<std::string>& target, NormOrder p, double tolerance) {
  if (r.empty()) return {true, 0.0};
  auto h = empirical_entropy(r.rows(), r.arity());
  auto to_vars = [&](const std::vector<std::string>& attrs) { return VarSet::of(r.attribute_indices(attrs)); };
  NormConstraint c{to_vars(cond), to_vars(target), p, log_lp_norm(degree_sequence(r, cond, target), p)};
  return verify_norm_constraint(h, c, tolerance);
}

std::string to_string(InequalityFamily f) {
  switch (f) {
    case InequalityFamily::path_lp: return "path-lp";
    case InequalityFamily::triangle_agm: return "triangle-agm";
    case InequalityFamily::triangle_l2: return "triangle-l2";
    case InequalityFamily::triangle_l3: return "triangle-l3";
    case InequalityFamily::cover_witness: return "cover-witness";
  }
  return "?";
}

InequalityFamily parse_family(const std::string& text) {
  for (auto f : kAllFamilies)
    if (to_string(f) == text) return f;
  throw InputError("unknown inequality family '" + text + "'");
}

std::size_t InequalityReport::violations() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.pass; }));
}

std::string InequalityReport::text() const {
  std::ostringstream out;
  out << std::left << std::setw(28) << "inequality" << std::setw(20) << "lhs" << std::setw(20) << "rhs"
      << std::setw(20) << "slack" << "result\n";
  for (const auto& c : checks)
    out << std::setw(28) << c.name << std::setw(20) << significant(c.lhs) << std::setw(20) << significant(c.rhs)
        << std::setw(20) << significant(c.slack()) << (c.pass ? "pass" : "FAIL") << "\n";
  return out.str();
}

std::string InequalityReport::json() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& c : checks)
    doc.push_back({{"inequality", c.name},
                   {"lhs", significant(c.lhs)},
                   {"rhs", significant(c.rhs)},
                   {"slack", significant(c.slack())},
                   {"pass", c.pass}});
  return doc.dump(2);
}

ConjunctiveQuery path_query() { return parse_query("P3(X,Y,Z,U) :- R(X,Y), S(Y,Z), T(Z,U)."); }
ConjunctiveQuery triangle_query() { return parse_query("C3(X,Y,Z) :- R(X,Y), S(Y,Z), T(Z,X)."); }

namespace {

constexpr double kRelTol = 1e-9;

const Relation& binary(const Database& db, const std::string& name) {
  const Relation& r = db.at(name);
  if (r.arity() != 2) throw InputError("relation " + name + " must be binary");
  return r;
}

/// log ||deg_r(col target | col cond)||_p over the two columns of a binary relation.
double log_norm(const Relation& r, int cond_col, int target_col, NormOrder p) {
  return log_lp_norm(degree_sequence(r, {r.attributes()[cond_col]}, {r.attributes()[target_col]}), p);
}

double log_card(const Relation& r) { return r.empty() ? -std::numeric_limits<double>::infinity() : std::log(double(r.size())); }

InequalityCheck closed_form(std::string name, std::int64_t lhs, double log_rhs) {
  const double rhs = std::exp(log_rhs);
  return {std::move(name), static_cast<double>(lhs), rhs, static_cast<double>(lhs) <= rhs * (1 + kRelTol)};
}

void cover_check(InequalityReport& report, const std::string& shape, const Database& db, const ConjunctiveQuery& q) {
  const NormOrder inf = NormOrder::infinity();
  auto stats = exact_atom_statistics(db, q, std::span<const NormOrder>(&inf, 1));
  auto cover = cover_statistics(stats);
  auto res = chain_bound(q, cover);
  const auto* w = std::get_if<OrderedCoverWitness>(&res.witness);
  if (!w) return;  // a zero bound has no cover to check
  const auto position = [&] {
    std::vector<int> pos(q.num_vars());
    for (std::size_t k = 0; k < w->order.size(); ++k) pos[w->order[k]] = static_cast<int>(k);
    return pos;
  }();
  for (int v = 0; v < q.num_vars(); ++v) {
    double total = 0;
    for (std::size_t i = 0; i < cover.size(); ++i)
      if (covers(cover[i], v, position)) total += w->weights[i];
    report.checks.push_back({shape + " cover(" + q.variables()[v] + ")", 1.0, total, total >= 1 - kRelTol});
  }
}

}  // namespace

InequalityReport verify_inequalities(const Database& db, InequalityFamily family, std::int64_t cap) {
  const Relation& r = binary(db, "R");
  const Relation& s = binary(db, "S");
  const Relation& t = binary(db, "T");
  InequalityReport report;
  switch (family) {
    case InequalityFamily::path_lp: {
      const auto count = exact_join(db, path_query(), cap).count;
      for (int p : {2, 3}) {
        // R(X,Y): deg_R(X|Y) conditions on column 1; S(Y,Z), T(Z,U) on column 0.
        const double log_rhs = ((p - 2) * log_card(r) + 2 * log_norm(r, 1, 0, NormOrder(2)) +
                                (p - 1) * log_norm(s, 0, 1, NormOrder(p - 1)) + p * log_norm(t, 0, 1, NormOrder(p))) /
                               p;
        report.checks.push_back(closed_form("path-lp p=" + std::to_string(p), count, log_rhs));
      }
      break;
    }
    case InequalityFamily::triangle_agm: {
      const auto count = exact_join(db, triangle_query(), cap).count;
      report.checks.push_back(closed_form("triangle-agm", count, (log_card(r) + log_card(s) + log_card(t)) / 2));
      break;
    }
    case InequalityFamily::triangle_l2: {
      const auto count = exact_join(db, triangle_query(), cap).count;
      const NormOrder two(2);
      const double log_rhs = 2 * (log_norm(r, 0, 1, two) + log_norm(s, 0, 1, two) + log_norm(t, 0, 1, two)) / 3;
      report.checks.push_back(closed_form("triangle-l2", count, log_rhs));
      break;
    }
    case InequalityFamily::triangle_l3: {
      const auto count = exact_join(db, triangle_query(), cap).count;
      const NormOrder three(3);
      // deg_S(Y|Z) conditions S(Y,Z) on its second column.
      const double log_rhs = (3 * log_norm(r, 0, 1, three) + 3 * log_norm(s, 1, 0, three) + 5 * log_card(t)) / 6;
      report.checks.push_back(closed_form("triangle-l3", count, log_rhs));
      break;
    }
    case InequalityFamily::cover_witness:
      cover_check(report, "path", db, path_query());
      cover_check(report, "triangle", db, triangle_query());
      break;
  }
  return report;
}

}  // namespace pce

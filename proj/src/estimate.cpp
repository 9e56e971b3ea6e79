#include "pce/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pce/dsb.hpp"
#include "pce/error.hpp"

namespace pce {

std::vector<CoverStatistic> cover_statistics(std::span<const AtomStatistic> stats) {
  std::vector<CoverStatistic> out;
  for (const auto& s : stats) {
    if (s.p.is_infinite() || (s.p.value() == 1.0 && s.cond.empty()))
      out.push_back({s.atom, s.cond, s.target, s.log_norm});
  }
  return out;
}

std::vector<NormConstraint> norm_constraints(std::span<const AtomStatistic> stats) {
  std::vector<NormConstraint> out;
  for (const auto& s : stats) out.push_back({s.cond, s.target, s.p, s.log_norm});
  return out;
}

std::vector<double> atom_cardinalities(const ConjunctiveQuery& q, std::span<const AtomStatistic> stats) {
  const auto& atoms = q.atoms();
  std::vector<double> log_card(atoms.size(), std::numeric_limits<double>::infinity());
  for (const auto& s : stats) {
    if (!s.cond.empty() || s.target != atoms[s.atom].vars()) continue;
    if (!s.p.is_infinite() && s.p.value() != 1.0) continue;
    log_card[s.atom] = std::min(log_card[s.atom], s.log_norm);
  }
  std::vector<double> out;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (std::isinf(log_card[j]) && log_card[j] > 0)
      throw StatisticsError("no cardinality statistic for atom " + std::to_string(j) + " (" + atoms[j].relation + ")");
    out.push_back(std::exp(log_card[j]));
  }
  return out;
}

namespace {

VarSet vars_of(const std::vector<std::string>& attrs, const std::vector<std::string>& schema, const Atom& atom) {
  VarSet out;
  for (const auto& a : attrs) {
    auto it = std::find(schema.begin(), schema.end(), a);
    if (it == schema.end()) throw StatisticsError("catalog statistic names unknown attribute " + a);
    out = out.with(atom.args[it - schema.begin()]);
  }
  return out;
}

std::vector<std::string> attrs_of(VarSet vars, const std::vector<std::string>& schema, const Atom& atom) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < atom.args.size(); ++k)
    if (vars.contains(atom.args[k])) out.push_back(schema[k]);
  return out;
}

const std::vector<std::string>& checked_schema(const StatisticsCatalog& c, const Atom& atom) {
  const auto& schema = c.schema(atom.relation);
  if (schema.size() != atom.args.size())
    throw InputError("atom " + atom.relation + " has " + std::to_string(atom.args.size()) +
                     " arguments but the relation has " + std::to_string(schema.size()) + " attributes");
  return schema;
}

}  // namespace

std::vector<AtomStatistic> catalog_statistics(const StatisticsCatalog& c, const ConjunctiveQuery& q,
                                              const PredicateExpr& pred) {
  std::vector<AtomStatistic> out;
  for (std::size_t j = 0; j < q.atoms().size(); ++j) {
    const auto& atom = q.atoms()[j];
    const auto& schema = checked_schema(c, atom);
    for (const auto* e : c.entries_for(atom.relation)) {
      double v = select_stat(c, atom.relation, e->cond, e->target, e->p, pred);
      out.push_back({static_cast<int>(j), vars_of(e->cond, schema, atom), vars_of(e->target, schema, atom), e->p,
                     v > 0 ? std::log(v) : -std::numeric_limits<double>::infinity()});
    }
  }
  return out;
}

JoinSequences catalog_join_sequences(const StatisticsCatalog& c, const ConjunctiveQuery& q) {
  if (q.atoms().size() != 2) throw StatisticsError("degree sequence bound needs a two-atom query");
  const auto& a0 = q.atoms()[0];
  const auto& a1 = q.atoms()[1];
  const VarSet y = a0.vars() & a1.vars();
  auto lookup = [&](const Atom& atom) {
    const auto& schema = checked_schema(c, atom);
    auto cond = attrs_of(y, schema, atom);
    auto target = attrs_of(atom.vars() - y, schema, atom);
    const auto* s = c.find_sequence(atom.relation, cond, target);
    std::string key;
    for (const auto& a : cond) key += (key.empty() ? "" : ",") + a;
    if (!s) throw StatisticsError("no stored degree sequence deg_" + atom.relation + "(*|" + key + ")");
    if (!s->sequence.cdf_certified)
      throw StatisticsError("degree sequence deg_" + atom.relation + "(*|" + key + ") is not certified");
    return s->sequence;
  };
  return {lookup(a0), lookup(a1)};
}

std::string to_string(Method m) {
  switch (m) {
    case Method::agm: return "agm";
    case Method::cb: return "cb";
    case Method::boundsketch: return "boundsketch";
    case Method::polyb: return "polyb";
    case Method::dsb: return "dsb";
  }
  return "?";
}

std::vector<Method> parse_methods(const std::string& text) {
  if (text == "all") return {std::begin(kAllMethods), std::end(kAllMethods)};
  std::vector<Method> out;
  std::stringstream in(text);
  std::string name;
  while (std::getline(in, name, ',')) {
    name.erase(0, name.find_first_not_of(' '));
    name.erase(name.find_last_not_of(' ') + 1);
    auto it = std::find_if(std::begin(kAllMethods), std::end(kAllMethods),
                           [&](Method m) { return to_string(m) == name; });
    if (it == std::end(kAllMethods)) throw InputError("unknown method '" + name + "'");
    if (std::find(out.begin(), out.end(), *it) == out.end()) out.push_back(*it);
  }
  if (out.empty()) throw InputError("no methods given");
  return out;
}

std::string to_string(MethodOutcome::Status s) {
  switch (s) {
    case MethodOutcome::Status::ok: return "ok";
    case MethodOutcome::Status::unavailable: return "unavailable";
    case MethodOutcome::Status::failed: return "failed";
  }
  return "?";
}

namespace {

BoundResult run_polyb(const ConjunctiveQuery& q, std::span<const AtomStatistic> stats, bool group_by) {
  auto constraints = norm_constraints(stats);
  if (group_by) return polyb(q, constraints, q.head_vars());
  auto red = drop_nonjoin_vars(q);
  if (red.reduced.num_vars() < q.num_vars() && reduction_is_exact(red, constraints)) {
    std::vector<NormConstraint> mapped;
    for (const auto& c : constraints) mapped.push_back(red.map(c));
    return polyb(red.reduced, mapped);
  }
  return polyb(q, constraints);
}

BoundResult run_cb(const ConjunctiveQuery& q, std::span<const CoverStatistic> stats, int max_vars) {
  if (auto r = acyclic_chain_bound(q, stats)) return *r;
  return chain_bound(q, stats, max_vars);
}

}  // namespace

std::vector<MethodOutcome> run_methods(const ConjunctiveQuery& q, std::span<const AtomStatistic> stats,
                                       std::span<const Method> methods, const EstimateOptions& options,
                                       const std::optional<JoinSequences>& join) {
  const auto cover = cover_statistics(stats);
  std::vector<MethodOutcome> out;
  for (Method m : methods) {
    MethodOutcome o{m, MethodOutcome::Status::ok, {}, {}};
    try {
      switch (m) {
        case Method::agm: o.result = agm_bound(q, atom_cardinalities(q, stats)); break;
        case Method::cb: o.result = run_cb(q, cover, options.max_chain_vars); break;
        case Method::boundsketch: o.result = bound_sketch(q, cover); break;
        case Method::polyb: o.result = run_polyb(q, stats, options.group_by); break;
        case Method::dsb:
          if (q.atoms().size() != 2) {
            o.status = MethodOutcome::Status::unavailable;
            o.reason = "requires 2-atom query";
          } else if (!join) {
            throw StatisticsError("no degree sequences for the join attributes");
          } else {
            o.result = dsb_join_bound(join->a, join->b);
          }
          break;
      }
    } catch (const Error& e) {
      o.status = MethodOutcome::Status::failed;
      o.reason = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::optional<MethodOutcome> best_outcome(std::span<const MethodOutcome> outcomes) {
  std::optional<MethodOutcome> best;
  for (const auto& o : outcomes)
    if (o.status == MethodOutcome::Status::ok && (!best || o.result.log_bound < best->result.log_bound)) best = o;
  return best;
}

}  // namespace pce

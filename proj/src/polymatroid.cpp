#include "pce/polymatroid.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>

#include "pce/error.hpp"
#include "pce/lp.hpp"

namespace pce {

namespace {

std::vector<ElementalInequality> make_elemental(int n) {
  std::vector<ElementalInequality> out;
  const VarSet all = VarSet::first(n);
  for (int i = 0; i < n; ++i) out.push_back({{{all, 1}, {all.without(i), -1}}});
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const VarSet rest = all.without(i).without(j);
      // Enumerate every subset W of rest.
      for (std::uint32_t w = rest.bits();; w = (w - 1) & rest.bits()) {
        VarSet ws(w);
        out.push_back({{{ws.with(i), 1}, {ws.with(j), 1}, {ws.with(i).with(j), -1}, {ws, -1}}});
        if (w == 0) break;
      }
    }
  }
  return out;
}

}  // namespace

const std::vector<ElementalInequality>& elemental_inequalities(int n) {
  if (n < 1 || n > kMaxPolymatroidVars)
    throw InputError("elemental inequalities are available for 1 to 14 variables, got " + std::to_string(n));
  static std::array<std::once_flag, kMaxPolymatroidVars + 1> once;
  static std::array<std::unique_ptr<std::vector<ElementalInequality>>, kMaxPolymatroidVars + 1> cache;
  std::call_once(once[n], [n] { cache[n] = std::make_unique<std::vector<ElementalInequality>>(make_elemental(n)); });
  return *cache[n];
}

BoundResult polyb(int num_vars, std::span<const NormConstraint> constraints, VarSet objective) {
  const auto& shannon = elemental_inequalities(num_vars);
  const VarSet all = VarSet::first(num_vars);
  if (!objective.subset_of(all)) throw InputError("objective mentions unknown variables");
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    if (!(constraints[k].cond | constraints[k].target).subset_of(all))
      throw InputError("statistic mentions unknown variables");
    if (constraints[k].log_norm == -std::numeric_limits<double>::infinity())
      return BoundResult::zero(static_cast<int>(k));
  }
  if (objective.empty()) {
    EntropyVector h(num_vars);
    return BoundResult::from_log(0.0, EntropyWitness{h.values});
  }

  // LP variable k stands for h(mask k+1); h(empty) is the constant 0.
  const int dims = (1 << num_vars) - 1;
  using Term = lp::LinearProgram<double>::Term;
  lp::LinearProgram<double> prog(dims, lp::Direction::maximize);
  prog.set_objective(static_cast<int>(objective.bits()) - 1, 1.0);

  auto add_term = [](std::vector<Term>& terms, VarSet s, double c) {
    if (s.empty() || c == 0) return;
    for (auto& t : terms)
      if (t.first == static_cast<int>(s.bits()) - 1) {
        t.second += c;
        return;
      }
    terms.emplace_back(static_cast<int>(s.bits()) - 1, c);
  };

  for (const auto& c : constraints) {
    std::vector<Term> terms;
    add_term(terms, c.cond | c.target, 1.0);
    add_term(terms, c.cond, c.p.reciprocal() - 1.0);
    std::erase_if(terms, [](const Term& t) { return t.second == 0; });
    if (terms.empty()) continue;
    prog.add_constraint(std::move(terms), lp::Sense::less_equal, c.log_norm);
  }
  // Elemental inequalities as -(sum) <= 0 keep every right-hand side at zero.
  for (const auto& ineq : shannon) {
    std::vector<Term> terms;
    for (const auto& t : ineq.terms) add_term(terms, t.set, -t.coeff);
    prog.add_constraint(std::move(terms), lp::Sense::less_equal, 0.0);
  }

  auto res = lp::solve(prog);
  if (res.status == lp::Status::unbounded)
    throw StatisticsError("statistics do not bound the query: some variable is unconstrained");
  if (res.status != lp::Status::optimal)
    throw Error(std::string("polymatroid LP failed: ") + lp::to_string(res.status));

  EntropyVector h(num_vars);
  h.values.tail(dims) = res.point;
  return BoundResult::from_log(res.value, EntropyWitness{h.values});
}

BoundResult polyb(const ConjunctiveQuery& q, std::span<const NormConstraint> constraints) {
  return polyb(q.num_vars(), constraints, q.all_vars());
}

BoundResult polyb(const ConjunctiveQuery& q, std::span<const NormConstraint> constraints, VarSet objective) {
  return polyb(q.num_vars(), constraints, objective);
}

VarSet VariableReduction::map(VarSet s) const {
  VarSet out;
  for (int v : s.members()) out = out.with(var_map[v]);
  return out;
}

NormConstraint VariableReduction::map(const NormConstraint& c) const {
  return {map(c.cond), map(c.target), c.p, c.log_norm};
}

VariableReduction drop_nonjoin_vars(const ConjunctiveQuery& q) {
  const int n = q.num_vars();
  std::vector<int> occurrences(n, 0);
  for (const auto& a : q.atoms())
    for (int v : a.args) ++occurrences[v];

  // Representative of each variable in the original numbering.
  std::vector<int> rep(n);
  for (int v = 0; v < n; ++v) rep[v] = v;
  for (const auto& a : q.atoms()) {
    int first_private = -1;
    for (int v : a.args) {
      if (occurrences[v] != 1) continue;
      if (first_private < 0) first_private = v;
      rep[v] = first_private;
    }
  }

  std::vector<std::string> names;
  std::vector<int> renumber(n, -1);
  VariableReduction out;
  out.var_map.assign(n, -1);
  std::vector<Atom> atoms;
  for (const auto& a : q.atoms()) {
    Atom reduced{a.relation, {}};
    for (int v : a.args) {
      if (rep[v] != v) continue;
      if (renumber[v] < 0) {
        renumber[v] = static_cast<int>(names.size());
        names.push_back(q.variables()[v]);
      }
      reduced.args.push_back(renumber[v]);
    }
    atoms.push_back(std::move(reduced));
  }
  for (int v = 0; v < n; ++v) out.var_map[v] = renumber[rep[v]];
  std::vector<int> head;
  for (int v : q.head()) {
    int m = out.var_map[v];
    if (std::find(head.begin(), head.end(), m) == head.end()) head.push_back(m);
  }
  out.reduced = ConjunctiveQuery(q.name(), std::move(names), std::move(head), std::move(atoms));
  return out;
}

bool reduction_is_exact(const VariableReduction& r, std::span<const NormConstraint> constraints) {
  const int n = static_cast<int>(r.var_map.size());
  // Group of original variables per reduced variable.
  std::vector<VarSet> group(r.reduced.num_vars());
  for (int v = 0; v < n; ++v) group[r.var_map[v]] = group[r.var_map[v]].with(v);
  for (const auto& c : constraints) {
    for (VarSet side : {c.cond, c.target}) {
      for (const auto& g : group) {
        VarSet hit = side & g;
        if (!hit.empty() && hit != g) return false;
      }
    }
  }
  return true;
}

}  // namespace pce

#include "pce/cover_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "pce/error.hpp"
#include "pce/format.hpp"
#include "pce/lp.hpp"

namespace pce {

std::string describe(const Witness& w) {
  std::ostringstream out;
  auto list = [&](const auto& xs) {
    out << "[";
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << significant(xs[i], 6);
    out << "]";
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ZeroWitness>) {
          out << "zero statistic #" << x.statistic;
        } else if constexpr (std::is_same_v<T, EdgeCoverWitness>) {
          out << "w=";
          list(x.weights);
        } else if constexpr (std::is_same_v<T, OrderedCoverWitness>) {
          out << "order=[";
          for (std::size_t i = 0; i < x.order.size(); ++i) out << (i ? "," : "") << x.order[i];
          out << "] w=";
          list(x.weights);
        } else if constexpr (std::is_same_v<T, PathWitness>) {
          out << "path=";
          for (std::size_t i = 0; i < x.steps.size(); ++i) out << (i ? "," : "") << "#" << x.steps[i];
        } else if constexpr (std::is_same_v<T, EntropyWitness>) {
          out << "h(all)=" << significant(x.h.size() ? x.h(x.h.size() - 1) : 0.0, 6);
        } else if constexpr (std::is_same_v<T, SumWitness>) {
          out << x.terms << " rank-aligned terms";
        }
      },
      w);
  return out.str();
}

namespace {

struct CoverLpSolution {
  double value;
  std::vector<double> weights;
};

/// min sum_i cost_i w_i  s.t.  for every variable v: sum_{i in covering[v]} w_i >= 1, w >= 0.
/// Absent when some variable has no covering statistic.
std::optional<CoverLpSolution> solve_cover_lp(const std::vector<std::vector<int>>& covering,
                                              const std::vector<double>& costs) {
  lp::LinearProgram<double> prog(static_cast<int>(costs.size()), lp::Direction::minimize);
  for (std::size_t i = 0; i < costs.size(); ++i) prog.set_objective(static_cast<int>(i), costs[i]);
  for (const auto& cs : covering) {
    if (cs.empty()) return std::nullopt;
    std::vector<lp::LinearProgram<double>::Term> terms;
    for (int i : cs) terms.emplace_back(i, 1.0);
    prog.add_constraint(std::move(terms), lp::Sense::greater_equal, 1.0);
  }
  auto res = lp::solve(prog);
  if (res.status != lp::Status::optimal)
    throw Error(std::string("cover LP failed: ") + lp::to_string(res.status));
  std::vector<double> w(res.point.data(), res.point.data() + res.point.size());
  return CoverLpSolution{res.value, std::move(w)};
}

std::optional<int> first_nonpositive(std::span<const CoverStatistic> stats) {
  // Max degrees and cardinalities are integers, so a value below one is zero.
  for (std::size_t i = 0; i < stats.size(); ++i)
    if (stats[i].log_value < 0) return static_cast<int>(i);
  return std::nullopt;
}

void check_stats(const ConjunctiveQuery& q, std::span<const CoverStatistic> stats) {
  for (const auto& s : stats) {
    if (s.atom < 0 || s.atom >= static_cast<int>(q.atoms().size()))
      throw InputError("statistic refers to a nonexistent atom");
    if (!(s.cond | s.target).subset_of(q.atoms()[s.atom].vars()))
      throw InputError("statistic mentions variables outside its atom");
  }
}

std::vector<int> positions_of(const std::vector<int>& order) {
  std::vector<int> pos(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<int>(k);
  return pos;
}

std::vector<double> log_costs(std::span<const CoverStatistic> stats) {
  std::vector<double> c;
  for (const auto& s : stats) c.push_back(s.log_value);
  return c;
}

}  // namespace

bool covers(const CoverStatistic& s, int var, const std::vector<int>& position) {
  if (!s.target.contains(var) || s.cond.contains(var)) return false;
  for (int u : s.cond.members())
    if (position[u] >= position[var]) return false;
  return true;
}

BoundResult agm_bound(const ConjunctiveQuery& q, std::span<const double> cardinalities) {
  const auto& atoms = q.atoms();
  if (cardinalities.size() != atoms.size())
    throw StatisticsError("AGM bound needs one cardinality per atom");
  for (std::size_t j = 0; j < atoms.size(); ++j)
    if (cardinalities[j] <= 0) return BoundResult::zero(static_cast<int>(j));

  std::vector<std::vector<int>> covering(q.num_vars());
  for (std::size_t j = 0; j < atoms.size(); ++j)
    for (int v : atoms[j].args) covering[v].push_back(static_cast<int>(j));
  std::vector<double> costs;
  for (double c : cardinalities) costs.push_back(std::log(c));
  auto sol = solve_cover_lp(covering, costs);
  return BoundResult::from_log(sol->value, EdgeCoverWitness{std::move(sol->weights)});
}

BoundResult chain_bound(const ConjunctiveQuery& q, std::span<const CoverStatistic> stats, int max_vars) {
  const int n = q.num_vars();
  if (n > max_vars)
    throw StatisticsError("chain bound enumerates orderings of at most " + std::to_string(max_vars) +
                          " variables; query has " + std::to_string(n));
  check_stats(q, stats);
  if (auto z = first_nonpositive(stats)) return BoundResult::zero(*z);

  const auto costs = log_costs(stats);
  // Coverage of a variable depends only on the set of variables before it.
  auto covering_given = [&](int var, VarSet before) {
    std::vector<int> out;
    for (std::size_t i = 0; i < stats.size(); ++i)
      if (stats[i].target.contains(var) && !stats[i].cond.contains(var) && stats[i].cond.subset_of(before))
        out.push_back(static_cast<int>(i));
    return out;
  };

  std::map<std::vector<std::vector<int>>, CoverLpSolution> memo;
  std::optional<BoundResult> best;
  std::vector<int> order;
  std::vector<std::vector<int>> covering(n);

  auto recurse = [&](auto&& self, VarSet placed) -> void {
    if (static_cast<int>(order.size()) == n) {
      auto it = memo.find(covering);
      if (it == memo.end()) it = memo.emplace(covering, *solve_cover_lp(covering, costs)).first;
      if (!best || it->second.value < best->log_bound - 1e-12)
        best = BoundResult::from_log(it->second.value, OrderedCoverWitness{order, it->second.weights});
      return;
    }
    for (int x = 0; x < n; ++x) {
      if (placed.contains(x)) continue;
      auto cs = covering_given(x, placed);
      if (cs.empty()) continue;  // x can never be covered after this prefix
      covering[x] = std::move(cs);
      order.push_back(x);
      self(self, placed.with(x));
      order.pop_back();
      covering[x].clear();
    }
  };
  recurse(recurse, VarSet{});
  if (!best) throw StatisticsError("statistics do not cover every query variable under any ordering");
  return *best;
}

BoundResult bound_sketch(const ConjunctiveQuery& q, std::span<const CoverStatistic> stats) {
  const int n = q.num_vars();
  if (n > 20) throw StatisticsError("bound sketch is limited to 20 variables");
  check_stats(q, stats);
  if (auto z = first_nonpositive(stats)) return BoundResult::zero(*z);

  const std::uint32_t full = q.all_vars().bits();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(std::size_t{1} << n, inf);
  std::vector<int> via(dist.size(), -1);
  std::vector<std::uint32_t> prev(dist.size(), 0);
  dist[0] = 0;

  auto path_to = [&](std::uint32_t node) {
    std::vector<std::uint32_t> nodes{node};
    while (node != 0) {
      node = prev[node];
      nodes.push_back(node);
    }
    std::reverse(nodes.begin(), nodes.end());
    return nodes;
  };

  // Every edge strictly grows the set, so increasing mask order is topological.
  for (std::uint32_t w = 0; w <= full; ++w) {
    if (dist[w] == inf) continue;
    for (std::size_t i = 0; i < stats.size(); ++i) {
      if (!stats[i].cond.subset_of(VarSet(w))) continue;
      std::uint32_t next = w | stats[i].target.bits();
      if (next == w) continue;
      double cand = dist[w] + stats[i].log_value;
      bool take = cand < dist[next] - 1e-12;
      if (!take && std::abs(cand - dist[next]) <= 1e-12) {
        auto mine = path_to(w);
        mine.push_back(next);
        take = mine < path_to(next);
      }
      if (take) {
        dist[next] = cand;
        via[next] = static_cast<int>(i);
        prev[next] = w;
      }
    }
  }
  if (dist[full] == inf) throw StatisticsError("statistics cannot reach all query variables");

  PathWitness pw;
  for (std::uint32_t node : path_to(full)) {
    pw.nodes.push_back(VarSet(node));
    if (node != 0) pw.steps.push_back(via[node]);
  }
  return BoundResult::from_log(dist[full], std::move(pw));
}

std::optional<BoundResult> acyclic_chain_bound(const ConjunctiveQuery& q, std::span<const CoverStatistic> stats) {
  check_stats(q, stats);
  std::vector<Dependency> deps;
  for (const auto& s : stats) deps.push_back({s.cond, s.target});
  auto order = statistics_topological_order(deps, q.num_vars());
  if (!order) return std::nullopt;
  if (auto z = first_nonpositive(stats)) return BoundResult::zero(*z);

  const auto position = positions_of(*order);
  std::vector<std::vector<int>> covering(q.num_vars());
  for (int v = 0; v < q.num_vars(); ++v)
    for (std::size_t i = 0; i < stats.size(); ++i)
      if (covers(stats[i], v, position)) covering[v].push_back(static_cast<int>(i));
  auto sol = solve_cover_lp(covering, log_costs(stats));
  if (!sol) throw StatisticsError("statistics do not cover every query variable");
  return BoundResult::from_log(sol->value, OrderedCoverWitness{*order, std::move(sol->weights)});
}

double witness_log_value(const BoundResult& r, std::span<const CoverStatistic> stats,
                         std::span<const double> atom_log_cardinalities) {
  return std::visit(
      [&](const auto& w) -> double {
        using T = std::decay_t<decltype(w)>;
        double sum = 0;
        if constexpr (std::is_same_v<T, OrderedCoverWitness>) {
          for (std::size_t i = 0; i < w.weights.size(); ++i)
            if (w.weights[i] != 0) sum += w.weights[i] * stats[i].log_value;
        } else if constexpr (std::is_same_v<T, PathWitness>) {
          for (int s : w.steps) sum += stats[s].log_value;
        } else if constexpr (std::is_same_v<T, EdgeCoverWitness>) {
          for (std::size_t j = 0; j < w.weights.size(); ++j)
            if (w.weights[j] != 0) sum += w.weights[j] * atom_log_cardinalities[j];
        } else if constexpr (std::is_same_v<T, ZeroWitness>) {
          sum = -std::numeric_limits<double>::infinity();
        } else {
          sum = r.log_bound;
        }
        return sum;
      },
      r.witness);
}

bool ordered_cover_holds(const OrderedCoverWitness& w, std::span<const CoverStatistic> stats, int num_vars,
                         double tolerance) {
  if (static_cast<int>(w.order.size()) != num_vars || w.weights.size() != stats.size()) return false;
  const auto position = positions_of(w.order);
  for (int v = 0; v < num_vars; ++v) {
    double total = 0;
    for (std::size_t i = 0; i < stats.size(); ++i)
      if (covers(stats[i], v, position)) total += w.weights[i];
    if (total < 1 - tolerance) return false;
  }
  return true;
}

}  // namespace pce

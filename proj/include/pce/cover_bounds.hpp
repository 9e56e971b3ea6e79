#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pce/bound.hpp"
#include "pce/query.hpp"

namespace pce {

/// A max-degree statistic ||deg_R(V|U)||_inf of atom `atom`, over query
/// variables. A cardinality |R| is the pair (atom vars | empty).
struct CoverStatistic {
  int atom = 0;
  VarSet cond;
  VarSet target;
  double log_value = 0;
};

/// Min over fractional edge covers w of prod |R_j|^w_j. `cardinalities` has
/// one entry per atom.
BoundResult agm_bound(const ConjunctiveQuery& q, std::span<const double> cardinalities);

/// True iff the statistic (V|U) covers `var` under the order given by
/// `position` (position[v] = rank of v): var in V - U and all of U before it.
bool covers(const CoverStatistic& s, int var, const std::vector<int>& position);

inline constexpr int kDefaultMaxChainVars = 8;

/// Min over orderings and fractional covers of prod d_i^w_i. Orderings are
/// enumerated lexicographically with prefix pruning; the witness is the first
/// optimal one. Throws StatisticsError if the query has more than `max_vars`
/// variables or some variable cannot be covered.
BoundResult chain_bound(const ConjunctiveQuery& q, std::span<const CoverStatistic> stats,
                        int max_vars = kDefaultMaxChainVars);

/// Integral chain bound: shortest path from the empty set to all variables,
/// an edge W -> W + V_i of weight log d_i for each statistic with U_i in W.
/// Ties go to the lexicographically smallest node sequence.
BoundResult bound_sketch(const ConjunctiveQuery& q, std::span<const CoverStatistic> stats);

/// The chain bound for acyclic statistics: one LP over a topological order.
/// Absent when the statistics' dependency graph has a cycle.
std::optional<BoundResult> acyclic_chain_bound(const ConjunctiveQuery& q, std::span<const CoverStatistic> stats);

/// Log of the product the witness describes, recomputed from the statistics.
double witness_log_value(const BoundResult& r, std::span<const CoverStatistic> stats,
                         std::span<const double> atom_log_cardinalities = {});

/// Every variable receives total weight >= 1 from statistics covering it
/// under the witness ordering.
bool ordered_cover_holds(const OrderedCoverWitness& w, std::span<const CoverStatistic> stats, int num_vars,
                         double tolerance = 1e-9);

}  // namespace pce

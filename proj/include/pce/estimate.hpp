#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pce/bound.hpp"
#include "pce/catalog.hpp"
#include "pce/cover_bounds.hpp"
#include "pce/degree_sequence.hpp"
#include "pce/polymatroid.hpp"
#include "pce/query.hpp"
#include "pce/stats.hpp"

namespace pce {

/// A relation statistic instantiated on one atom of a query: the attribute
/// sets are mapped through the atom's argument positions. A self-join gets
/// one copy per atom.
struct AtomStatistic {
  int atom = 0;
  VarSet cond;
  VarSet target;
  NormOrder p{1.0};
  double log_norm = 0;
};

/// The p = inf statistics, plus p = 1 statistics with an empty condition
/// (a projection size is also a max degree).
std::vector<CoverStatistic> cover_statistics(std::span<const AtomStatistic> stats);
std::vector<NormConstraint> norm_constraints(std::span<const AtomStatistic> stats);
/// |R_j| per atom, the smallest statistic on (atom vars | empty). Throws
/// StatisticsError when an atom has none.
std::vector<double> atom_cardinalities(const ConjunctiveQuery& q, std::span<const AtomStatistic> stats);

/// Every global catalog entry of every atom's relation, with the value chosen
/// by select_stat under `pred`.
std::vector<AtomStatistic> catalog_statistics(const StatisticsCatalog& c, const ConjunctiveQuery& q,
                                              const PredicateExpr& pred = {});

/// The stored sequences deg(*|Y) of both atoms of a two-atom query, Y being
/// their shared variables. Throws StatisticsError when either is missing.
struct JoinSequences {
  CompressedDegreeSequence a;
  CompressedDegreeSequence b;
};
JoinSequences catalog_join_sequences(const StatisticsCatalog& c, const ConjunctiveQuery& q);

enum class Method { agm, cb, boundsketch, polyb, dsb };
inline constexpr Method kAllMethods[] = {Method::agm, Method::cb, Method::boundsketch, Method::polyb, Method::dsb};

std::string to_string(Method m);
/// Comma-separated method names, or "all". Throws InputError on unknown names.
std::vector<Method> parse_methods(const std::string& text);

struct EstimateOptions {
  int max_chain_vars = kDefaultMaxChainVars;
  /// Bound the projection on the head variables instead of the full output
  /// (polyb only).
  bool group_by = false;
};

struct MethodOutcome {
  enum class Status { ok, unavailable, failed };

  Method method;
  Status status = Status::ok;
  std::string reason;
  BoundResult result;
};

std::string to_string(MethodOutcome::Status s);

/// Runs each method, turning library errors into failed outcomes. `join`
/// feeds dsb; without it dsb fails for lack of sequences.
std::vector<MethodOutcome> run_methods(const ConjunctiveQuery& q, std::span<const AtomStatistic> stats,
                                       std::span<const Method> methods, const EstimateOptions& options = {},
                                       const std::optional<JoinSequences>& join = std::nullopt);

/// Smallest bound among the ok outcomes; absent when none succeeded.
std::optional<MethodOutcome> best_outcome(std::span<const MethodOutcome> outcomes);

}  // namespace pce

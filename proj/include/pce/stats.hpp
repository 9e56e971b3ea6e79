#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pce/catalog.hpp"
#include "pce/degree_sequence.hpp"
#include "pce/relation.hpp"

namespace pce {

/// deg_r(V|U) by sort-and-scan over the projection on U+V. With U empty the
/// result is the single entry |proj_V(r)|. Throws InputError for unknown
/// attributes.
DegreeSequence degree_sequence(const Relation& r, const std::vector<std::string>& cond,
                               const std::vector<std::string>& target);

/// Default norm orders: 1, 2, 3, 4, inf.
std::vector<NormOrder> default_norm_orders();

/// One global entry per p for ||deg_r(V|U)||_p.
std::vector<StatEntry> build_global_stats(const Relation& r, const std::vector<std::string>& cond,
                                          const std::vector<std::string>& target,
                                          const std::vector<NormOrder>& ps);

inline constexpr int kMaxBuckets = 200;

/// Statistics of deg_r(V|U) conditioned on `cond_attr`:
///  - per-value norms for the `mcv_count` most frequent values (frequency
///    descending, then value ascending),
///  - a common entry, the max per-value norm over the remaining values,
///  - up to `buckets` equi-depth buckets over the remaining values, each with
///    the max per-value norm and the norm over the whole bucket.
/// Buckets are capped at kMaxBuckets.
std::vector<StatEntry> build_conditional_stats(const Relation& r, const std::string& cond_attr,
                                               const std::vector<std::string>& cond,
                                               const std::vector<std::string>& target,
                                               const std::vector<NormOrder>& ps, int mcv_count, int buckets);

/// Filter predicates used to pick conditional statistics.
struct PredicateExpr {
  enum class Kind { none, eq, in, and_, or_ };

  Kind kind = Kind::none;
  std::string relation;  // optional qualifier, empty matches any relation
  std::string attr;
  std::vector<Value> values;  // eq: exactly one, in: the list
  std::vector<PredicateExpr> children;

  static PredicateExpr none() { return {}; }
  static PredicateExpr eq(std::string attr, Value v) { return {Kind::eq, {}, std::move(attr), {std::move(v)}, {}}; }
  static PredicateExpr in(std::string attr, std::vector<Value> vs) {
    return {Kind::in, {}, std::move(attr), std::move(vs), {}};
  }
  static PredicateExpr all_of(std::vector<PredicateExpr> cs) { return {Kind::and_, {}, {}, {}, std::move(cs)}; }
  static PredicateExpr any_of(std::vector<PredicateExpr> cs) { return {Kind::or_, {}, {}, {}, std::move(cs)}; }
};

/// Grammar: `A=5 and (B=3 or B=4)`, `C in (1,2,3)`, `R.A='x'`. Empty text is
/// the none predicate.
PredicateExpr parse_predicate(std::string_view text);
std::string to_string(const PredicateExpr& e);

/// Picks the statistic for ||deg_relation(V|U)||_p under `pred`:
///  none -> global; eq(A,a) -> MCV entry for a, else common(A), else the
///  bucket containing a, else global; and -> min; or, in -> sum (p >= 1 only).
/// Throws StatisticsError when the global entry is missing or an or-combination
/// is asked for p < 1.
double select_stat(const StatisticsCatalog& c, const std::string& relation, const std::vector<std::string>& cond,
                   const std::vector<std::string>& target, NormOrder p, const PredicateExpr& pred);

/// What to compute for one relation.
struct StatisticSpec {
  std::vector<std::string> cond;
  std::vector<std::string> target;
  std::vector<NormOrder> ps;
  std::string cond_attr;  // empty: no conditional statistics
  int mcv_count = 0;
  int buckets = 0;
  /// Store the degree sequence as well: 0 losslessly, otherwise CDF-compressed
  /// to at most this many runs. Negative: no sequence.
  int max_runs = -1;
};

struct RelationSpec {
  std::string name;
  std::string file;  // relative to the data directory
  bool header = true;
  /// Adds cardinality, distinct counts and every single-attribute degree
  /// sequence with the default norm orders.
  bool simple = false;
  int simple_max_runs = 32;
  std::vector<StatisticSpec> statistics;
};

struct StatsConfig {
  std::vector<RelationSpec> relations;
};

StatsConfig parse_stats_config(const std::string& json_text);
StatsConfig load_stats_config(const std::string& path);

/// Statistics for one relation per its spec, always including |R|.
void add_relation_statistics(StatisticsCatalog& c, const Relation& r, const RelationSpec& spec);

/// Loads every CSV the config names (relative to data_dir), computes the
/// statistics one worker per relation, and records file digests. Per-relation
/// wall time goes to `seconds` when given.
StatisticsCatalog build_catalog(const StatsConfig& config, const std::string& data_dir,
                                std::map<std::string, double>* seconds = nullptr);

}  // namespace pce

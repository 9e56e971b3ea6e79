#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pce/relation.hpp"

namespace pce {

/// Outcome of one property check run over many seeded trials.
struct CheckResult {
  std::string name;
  std::int64_t trials = 0;
  std::int64_t checks = 0;
  std::int64_t violations = 0;
  /// Descriptions of the first few violations.
  std::vector<std::string> failures;

  void record(bool ok, const std::string& what);
};

/// Trial t of every check uses seed + t, so results depend only on the seed.
/// Every method's bound is at least the exact output size on random
/// instances with exact statistics; dsb is checked on two-atom instances with
/// exact and CDF-compressed sequences, and polyb's group-by variant against
/// the size of the projection.
CheckResult check_soundness(std::uint64_t seed, int trials);
/// With max-degree and cardinality statistics, polyb <= cb <= boundsketch and
/// cb <= agm; with cardinalities alone cb = agm. Relative tolerance 1e-6 in
/// log space.
CheckResult check_dominance(std::uint64_t seed, int trials);
/// Empirical entropies of query outputs satisfy every elemental inequality
/// and every norm constraint from true statistics, p in {1, 2, 3, inf}.
CheckResult check_entropy(std::uint64_t seed, int trials);
/// The closed-form path and triangle bounds and the chain bound's cover
/// witness, on random binary R, S, T.
CheckResult check_closed_forms(std::uint64_t seed, int trials);
/// sum a''b >= sum ab for non-increasing b and any a'' whose CDF dominates
/// that of a; cdf_upper_compress output is dominating, short enough and keeps
/// length and first entry.
CheckResult check_compression(std::uint64_t seed, int trials);
/// sum ab <= min(a1 |b|_1, |a|_1 b1) for sorted sequences, strictly for
/// equal-length non-constant pairs.
CheckResult check_dsb_improvement(std::uint64_t seed, int trials);
/// Adding one true statistic never increases polyb.
CheckResult check_statistic_monotonicity(std::uint64_t seed, int trials);
/// Norm constraints on the uniform distribution of every relation in db and,
/// when db has binary R, S, T, every closed-form inequality family.
CheckResult check_database(const Database& db);

enum class Suite { soundness, dominance, shannon, compression, all };
std::string to_string(Suite s);
Suite parse_suite(const std::string& text);

struct VerificationReport {
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<CheckResult> checks;

  std::int64_t violations() const;
  std::string text() const;
  std::string json() const;
};

/// Runs the checks belonging to `suite`, plus check_database when `db` is
/// given. soundness: soundness; dominance: dominance and monotonicity;
/// shannon: entropy and closed forms; compression: compression and dsb
/// improvement.
VerificationReport run_verification(Suite suite, std::uint64_t seed, int trials, const Database* db = nullptr);

}  // namespace pce

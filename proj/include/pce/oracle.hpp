#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pce/estimate.hpp"
#include "pce/polymatroid.hpp"
#include "pce/query.hpp"
#include "pce/relation.hpp"

namespace pce {

inline constexpr std::int64_t kDefaultOracleCap = 10'000'000;

struct JoinResult {
  std::int64_t count = 0;
  /// One value per query variable, sorted; filled only on request.
  std::vector<Tuple> rows;
};

/// Exact output of q over db, evaluated atom by atom with an ordered index on the
/// variables already bound. Throws OracleCapExceeded when an intermediate
/// result exceeds `cap` tuples and InputError for unknown relations or arity
/// mismatches.
JoinResult exact_join(const Database& db, const ConjunctiveQuery& q, std::int64_t cap = kDefaultOracleCap,
                      bool keep_rows = false);

/// Entropies of the uniform distribution over `rows` (n columns), natural
/// log. h(all) is exactly log |rows|. Throws InputError on an empty input.
EntropyVector empirical_entropy(const std::vector<Tuple>& rows, int num_vars);
EntropyVector empirical_entropy(const Database& db, const ConjunctiveQuery& q, std::int64_t cap = kDefaultOracleCap);

/// Exact ||deg_R(V|U)||_p of every atom for every U and non-empty V disjoint
/// from U, for each requested p.
std::vector<AtomStatistic> exact_atom_statistics(const Database& db, const ConjunctiveQuery& q,
                                                 std::span<const NormOrder> ps);

struct NormCheck {
  bool holds = true;
  /// log_norm - ((1/p) h(U) + h(V|U)).
  double slack = 0;
};

/// Checks (1/p) h(U) + h(V|U) <= log_norm at `h` within `tolerance`.
NormCheck verify_norm_constraint(const EntropyVector& h, const NormConstraint& c, double tolerance = 1e-9);
/// The same for the uniform distribution on r itself, with the exact norm of
/// deg_r(V|U).
NormCheck verify_norm_constraint(const Relation& r, const std::vector<std::string>& cond,
                                 const std::vector<std::string>& target, NormOrder p, double tolerance = 1e-9);

/// Closed-form bounds checked numerically against exact output sizes:
///   path_lp       |P3| <= (|R|^(p-2) ||deg_R(X|Y)||_2^2 ||deg_S(Z|Y)||_(p-1)^(p-1) ||deg_T(U|Z)||_p^p)^(1/p), p = 2, 3
///   triangle_agm  |C3| <= (|R| |S| |T|)^(1/2)
///   triangle_l2   |C3| <= (||deg_R(Y|X)||_2^2 ||deg_S(Z|Y)||_2^2 ||deg_T(X|Z)||_2^2)^(1/3)
///   triangle_l3   |C3| <= (||deg_R(Y|X)||_3^3 ||deg_S(Y|Z)||_3^3 |T|^5)^(1/6)
///   cover_witness every variable gets weight >= 1 under the chain bound's witness ordering
/// with P3 = R(X,Y), S(Y,Z), T(Z,U) and C3 = R(X,Y), S(Y,Z), T(Z,X).
enum class InequalityFamily { path_lp, triangle_agm, triangle_l2, triangle_l3, cover_witness };
inline constexpr InequalityFamily kAllFamilies[] = {InequalityFamily::path_lp, InequalityFamily::triangle_agm,
                                                    InequalityFamily::triangle_l2, InequalityFamily::triangle_l3,
                                                    InequalityFamily::cover_witness};
std::string to_string(InequalityFamily f);
InequalityFamily parse_family(const std::string& text);

struct InequalityCheck {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  bool pass = true;

  double slack() const { return rhs - lhs; }
};

struct InequalityReport {
  std::vector<InequalityCheck> checks;

  std::size_t violations() const;
  /// Columns: inequality, lhs, rhs, slack, result.
  std::string text() const;
  std::string json() const;
};

/// Evaluates one family on the binary relations R, S, T of db, with true
/// statistics on the right and the exact output size on the left. Relative
/// tolerance 1e-9.
InequalityReport verify_inequalities(const Database& db, InequalityFamily family,
                                           std::int64_t cap = kDefaultOracleCap);

/// The two query shapes used above.
ConjunctiveQuery path_query();
ConjunctiveQuery triangle_query();

}  // namespace pce

#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "pce/bound.hpp"
#include "pce/degree_sequence.hpp"
#include "pce/query.hpp"

namespace pce {

/// One value per subset of n variables, indexed by bitmask; h(empty) = 0.
struct EntropyVector {
  int num_vars = 0;
  Eigen::VectorXd values;

  EntropyVector() = default;
  explicit EntropyVector(int n) : num_vars(n), values(Eigen::VectorXd::Zero(Eigen::Index{1} << n)) {}

  double operator()(VarSet s) const { return values(s.bits()); }
  double& operator()(VarSet s) { return values(s.bits()); }
  /// h(V|U) = h(U+V) - h(U).
  double conditional(VarSet target, VarSet cond) const { return (*this)(target | cond) - (*this)(cond); }
};

/// sum of coeff * h(set) >= 0, at most four terms.
struct ElementalInequality {
  struct Term {
    VarSet set;
    int coeff;
  };
  std::vector<Term> terms;

  double evaluate(const EntropyVector& h) const {
    double s = 0;
    for (const auto& t : terms) s += t.coeff * h(t.set);
    return s;
  }
};

inline constexpr int kMaxPolymatroidVars = 14;

/// The n monotonicity inequalities h(all) - h(all - i) >= 0 followed by the
/// n(n-1)2^(n-3) submodularity inequalities
/// h(W+i) + h(W+j) - h(W+i+j) - h(W) >= 0. Computed once per n and shared.
/// Throws InputError unless 1 <= n <= 14.
const std::vector<ElementalInequality>& elemental_inequalities(int n);

/// (1/p) h(U) + h(V|U) <= log_norm; the h(U) term vanishes for p = inf.
struct NormConstraint {
  VarSet cond;
  VarSet target;
  NormOrder p{1.0};
  double log_norm = 0;

  /// log_norm minus the left-hand side at `h`.
  double slack(const EntropyVector& h) const {
    return log_norm - (p.reciprocal() * h(cond) + h.conditional(target, cond));
  }
};

/// Max h(objective) over polymatroids satisfying every constraint; the bound
/// is exp of that. `objective` defaults to all variables; a smaller set gives
/// the group-by / distinct estimate. Throws StatisticsError when the
/// statistics leave the objective unbounded.
BoundResult polyb(int num_vars, std::span<const NormConstraint> constraints, VarSet objective);
BoundResult polyb(const ConjunctiveQuery& q, std::span<const NormConstraint> constraints);
BoundResult polyb(const ConjunctiveQuery& q, std::span<const NormConstraint> constraints, VarSet objective);

/// A query with each atom's private variables fused into one.
struct VariableReduction {
  ConjunctiveQuery reduced;
  /// Original variable index -> reduced variable index.
  std::vector<int> var_map;

  VarSet map(VarSet s) const;
  NormConstraint map(const NormConstraint& c) const;
};

/// Per atom, the variables occurring in no other atom collapse into the first
/// of them. R(X,Y,Z,U,V), S(V,W,K,L) becomes R(X,V), S(V,W).
VariableReduction drop_nonjoin_vars(const ConjunctiveQuery& q);

/// True when every constraint mentions each fused group all-or-nothing, the
/// case in which the reduced LP has the same optimum.
bool reduction_is_exact(const VariableReduction& r, std::span<const NormConstraint> constraints);

}  // namespace pce

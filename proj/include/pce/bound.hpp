#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "pce/varset.hpp"

namespace pce {

/// A zero statistic (empty relation or selection) forced the bound to zero.
struct ZeroWitness {
  int statistic;
};

/// Fractional edge cover, one weight per atom.
struct EdgeCoverWitness {
  std::vector<double> weights;
};

/// A variable ordering and a fractional cover of the statistics under it.
struct OrderedCoverWitness {
  std::vector<int> order;
  std::vector<double> weights;  // one per statistic
};

/// A path from the empty set to all variables; step k applies statistic
/// steps[k] and arrives at nodes[k + 1].
struct PathWitness {
  std::vector<int> steps;
  std::vector<VarSet> nodes;
};

/// An optimal polymatroid, indexed by variable-set bitmask.
struct EntropyWitness {
  Eigen::VectorXd h;
};

/// Rank-aligned sum over this many nonzero terms.
struct SumWitness {
  std::size_t terms;
};

using Witness = std::variant<std::monostate, ZeroWitness, EdgeCoverWitness, OrderedCoverWitness, PathWitness,
                             EntropyWitness, SumWitness>;

struct BoundResult {
  /// Natural log of the bound; -inf for a zero bound.
  double log_bound = 0;
  /// exp(log_bound), saturating at the largest finite double.
  double bound = 1;
  Witness witness;

  static BoundResult from_log(double log_bound, Witness w = {}) {
    double b = std::exp(log_bound);
    if (std::isinf(b)) b = std::numeric_limits<double>::max();
    return {log_bound, b, std::move(w)};
  }
  static BoundResult zero(int statistic) { return {-std::numeric_limits<double>::infinity(), 0.0, ZeroWitness{statistic}}; }
};

std::string describe(const Witness& w);

}  // namespace pce

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pce/query.hpp"
#include "pce/relation.hpp"

namespace pce {

/// mt19937_64 with its own bounded draws, so a seed gives the same stream on
/// every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);
  /// Uniform in [0, 1).
  double unit();
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

struct InstanceOptions {
  int max_vars = 4;
  int max_atoms = 3;
  int max_tuples = 50;
  int max_domain = 6;
};

struct RandomInstance {
  Database db;
  ConjunctiveQuery query;
};

/// A random query over at most max_vars variables and max_atoms atoms (self
/// joins included) with skewed random data.
RandomInstance random_instance(std::uint64_t seed, const InstanceOptions& options = {});

/// Binary relations R, S, T over small skewed domains, for the path and
/// triangle shapes.
Database random_rst(std::uint64_t seed, int max_tuples = 50, int max_domain = 5);

/// Skewed random relation with `arity` columns A1..Ak.
Relation random_relation(Rng& rng, const std::string& name, int arity, int tuples, int domain);

/// Non-increasing sequence of `length` integers in [1, max_value].
std::vector<std::int64_t> random_degrees(Rng& rng, int length, int max_value);

}  // namespace pce

#include "pce/random_instance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pce {

std::int64_t Rng::uniform(std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do x = engine_();
  while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

Relation random_relation(Rng& rng, const std::string& name, int arity, int tuples, int domain) {
  std::vector<std::string> attrs;
  for (int k = 1; k <= arity; ++k) attrs.push_back("A" + std::to_string(k));
  std::vector<Tuple> rows;
  for (int i = 0; i < tuples; ++i) {
    Tuple t;
    for (int k = 0; k < arity; ++k) {
      // Squaring a uniform draw favours small values.
      const double u = rng.unit();
      t.push_back(static_cast<std::int64_t>(std::floor(u * u * domain)));
    }
    rows.push_back(std::move(t));
  }
  return Relation(name, std::move(attrs), std::move(rows));
}

RandomInstance random_instance(std::uint64_t seed, const InstanceOptions& options) {
  Rng rng(seed);
  const int n = static_cast<int>(rng.uniform(1, options.max_vars));
  const int m = static_cast<int>(rng.uniform(1, options.max_atoms));

  std::vector<std::vector<int>> args(m);
  for (auto& a : args) {
    const int arity = static_cast<int>(rng.uniform(1, std::min(n, 3)));
    std::vector<int> pool(n);
    for (int v = 0; v < n; ++v) pool[v] = v;
    for (int k = 0; k < arity; ++k) {
      const auto pick = rng.uniform(k, n - 1);
      std::swap(pool[k], pool[pick]);
      a.push_back(pool[k]);
    }
  }
  for (int v = 0; v < n; ++v) {
    bool used = false;
    for (const auto& a : args) used = used || std::find(a.begin(), a.end(), v) != a.end();
    if (!used) args[rng.uniform(0, m - 1)].push_back(v);
  }

  RandomInstance out;
  std::vector<std::string> rel_names;
  std::string text = "Q(";
  for (int v = 0; v < n; ++v) text += (v ? "," : "") + std::string("X") + std::to_string(v);
  text += ") :- ";
  for (int j = 0; j < m; ++j) {
    const int arity = static_cast<int>(args[j].size());
    std::string name;
    // Occasionally reuse an earlier relation of the same arity: a self-join.
    for (int k = 0; k < j && name.empty(); ++k)
      if (static_cast<int>(args[k].size()) == arity && rng.chance(0.2)) name = rel_names[k];
    if (name.empty()) {
      name = "R" + std::to_string(j);
      const int tuples = rng.chance(0.05) ? 0 : static_cast<int>(rng.uniform(1, options.max_tuples));
      const int domain = static_cast<int>(rng.uniform(2, options.max_domain));
      out.db.add(random_relation(rng, name, arity, tuples, domain));
    }
    rel_names.push_back(name);
    text += (j ? ", " : "") + name + "(";
    for (int k = 0; k < arity; ++k) text += (k ? "," : "") + std::string("X") + std::to_string(args[j][k]);
    text += ")";
  }
  text += ".";
  out.query = parse_query(text);
  return out;
}

Database random_rst(std::uint64_t seed, int max_tuples, int max_domain) {
  Rng rng(seed);
  Database db;
  for (const char* name : {"R", "S", "T"}) {
    const int tuples = static_cast<int>(rng.uniform(1, max_tuples));
    const int domain = static_cast<int>(rng.uniform(2, max_domain));
    db.add(random_relation(rng, name, 2, tuples, domain));
  }
  return db;
}

std::vector<std::int64_t> random_degrees(Rng& rng, int length, int max_value) {
  std::vector<std::int64_t> d;
  for (int i = 0; i < length; ++i) d.push_back(rng.uniform(1, max_value));
  std::sort(d.begin(), d.end(), std::greater<>());
  return d;
}

}  // namespace pce

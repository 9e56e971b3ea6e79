#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pce/varset.hpp"

namespace pce {

struct Atom {
  std::string relation;
  /// Variable indices into ConjunctiveQuery::variables, one per argument position.
  std::vector<int> args;

  VarSet vars() const { return VarSet::of(args); }
};

/// Q(head) :- R1(U1), ..., Rm(Um). Variables are numbered by first appearance
/// in the body.
class ConjunctiveQuery {
 public:
  ConjunctiveQuery() = default;
  ConjunctiveQuery(std::string name, std::vector<std::string> variables, std::vector<int> head,
                   std::vector<Atom> atoms);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<int>& head() const { return head_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  int num_vars() const { return static_cast<int>(variables_.size()); }
  VarSet all_vars() const { return VarSet::first(num_vars()); }
  VarSet head_vars() const { return VarSet::of(head_); }
  std::optional<int> var_index(std::string_view name) const;

 private:
  std::string name_;
  std::vector<std::string> variables_;
  std::vector<int> head_;
  std::vector<Atom> atoms_;
};

/// Parses `Head(v1,...,vk) :- Atom1(w...), Atom2(w...), ... .`
/// Lines starting with `%` are comments.
ConjunctiveQuery parse_query(std::string_view text);
ConjunctiveQuery load_query(const std::string& path);

/// Canonical text form; parse_query(to_string(q)) reproduces q.
std::string to_string(const ConjunctiveQuery& q);

struct Hypergraph {
  int num_vertices = 0;
  /// One edge per atom, duplicates preserved.
  std::vector<VarSet> edges;
};

Hypergraph build_hypergraph(const ConjunctiveQuery& q);

/// True iff the variable/edge incidence graph is a forest. Two edges sharing
/// two or more variables form a cycle.
bool is_berge_acyclic(const Hypergraph& h);

/// A conditional pair (V|U) over query variables.
struct Dependency {
  VarSet cond;
  VarSet target;
};

/// An ordering of `num_vars` variables in which, for every pair (V|U), all of U
/// precedes all of V - U. Absent when the pairs are cyclic. Ties go to the
/// smallest variable index, so an empty list yields 0, 1, ..., n-1.
std::optional<std::vector<int>> statistics_topological_order(const std::vector<Dependency>& deps,
                                                             int num_vars);

}  // namespace pce

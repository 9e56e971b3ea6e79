#include "pce/query.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>

#include "pce/error.hpp"

namespace pce {

ConjunctiveQuery::ConjunctiveQuery(std::string name, std::vector<std::string> variables,
                                   std::vector<int> head, std::vector<Atom> atoms)
    : name_(std::move(name)),
      variables_(std::move(variables)),
      head_(std::move(head)),
      atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw InputError("query " + name_ + " has an empty body");
  if (variables_.size() > 32) throw InputError("query " + name_ + " has more than 32 variables");
  VarSet seen;
  for (const auto& a : atoms_) {
    for (int v : a.args)
      if (v < 0 || v >= num_vars()) throw InputError("atom argument out of range");
    if (a.vars().size() != static_cast<int>(a.args.size()))
      throw InputError("atom " + a.relation + " repeats a variable");
    seen = seen | a.vars();
  }
  if (seen != all_vars()) throw InputError("query " + name_ + " declares unused variables");
  for (int v : head_)
    if (v < 0 || v >= num_vars()) throw InputError("head variable out of range");
}

std::optional<int> ConjunctiveQuery::var_index(std::string_view name) const {
  auto it = std::find(variables_.begin(), variables_.end(), name);
  if (it == variables_.end()) return std::nullopt;
  return static_cast<int>(it - variables_.begin());
}

namespace {

class QueryLexer {
 public:
  explicit QueryLexer(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  bool peek(std::string_view tok) {
    skip_space();
    return text_.substr(pos_, tok.size()) == tok;
  }

  void expect(std::string_view tok) {
    if (!peek(tok)) throw ParseError("expected '" + std::string(tok) + "'", pos_);
    pos_ += tok.size();
  }

  bool accept(std::string_view tok) {
    if (!peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }

  std::string identifier() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) throw ParseError("expected identifier", pos_);
    return std::string(text_.substr(start, pos_ - start));
  }

  std::size_t position() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::pair<std::string, std::vector<std::string>> parse_atom(QueryLexer& lex, bool allow_empty) {
  std::string name = lex.identifier();
  lex.expect("(");
  std::vector<std::string> args;
  if (!lex.accept(")")) {
    do {
      args.push_back(lex.identifier());
    } while (lex.accept(","));
    lex.expect(")");
  }
  if (args.empty() && !allow_empty) throw ParseError("atom " + name + " has no arguments", lex.position());
  return {name, args};
}

}  // namespace

ConjunctiveQuery parse_query(std::string_view text) {
  QueryLexer lex(text);
  auto [name, head_names] = parse_atom(lex, true);
  lex.expect(":-");

  std::vector<std::string> vars;
  std::vector<Atom> atoms;
  auto intern = [&](const std::string& v) {
    auto it = std::find(vars.begin(), vars.end(), v);
    if (it != vars.end()) return static_cast<int>(it - vars.begin());
    vars.push_back(v);
    return static_cast<int>(vars.size() - 1);
  };

  if (lex.peek(".")) throw ParseError("empty query body", lex.position());
  do {
    std::size_t at = lex.position();
    auto [rel, args] = parse_atom(lex, false);
    Atom atom{rel, {}};
    for (const auto& a : args) {
      int idx = intern(a);
      if (std::find(atom.args.begin(), atom.args.end(), idx) != atom.args.end())
        throw ParseError("variable " + a + " repeated in atom " + rel, at);
      atom.args.push_back(idx);
    }
    atoms.push_back(std::move(atom));
  } while (lex.accept(","));
  lex.expect(".");
  if (!lex.at_end()) throw ParseError("trailing input after query", lex.position());

  std::vector<int> head;
  for (const auto& h : head_names) {
    auto it = std::find(vars.begin(), vars.end(), h);
    if (it == vars.end()) throw InputError("head variable " + h + " does not occur in the body");
    head.push_back(static_cast<int>(it - vars.begin()));
  }
  return ConjunctiveQuery(name, std::move(vars), std::move(head), std::move(atoms));
}

ConjunctiveQuery load_query(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read query file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_query(buf.str());
}

std::string to_string(const ConjunctiveQuery& q) {
  std::ostringstream out;
  auto list = [&](const std::vector<int>& vs) {
    for (std::size_t i = 0; i < vs.size(); ++i) out << (i ? "," : "") << q.variables()[vs[i]];
  };
  out << q.name() << "(";
  list(q.head());
  out << ") :- ";
  for (std::size_t i = 0; i < q.atoms().size(); ++i) {
    const auto& a = q.atoms()[i];
    out << (i ? ", " : "") << a.relation << "(";
    list(a.args);
    out << ")";
  }
  out << ".";
  return out.str();
}

Hypergraph build_hypergraph(const ConjunctiveQuery& q) {
  Hypergraph h;
  h.num_vertices = q.num_vars();
  for (const auto& a : q.atoms()) h.edges.push_back(a.vars());
  return h;
}

bool is_berge_acyclic(const Hypergraph& h) {
  // Union-find over vertices [0, n) and edges [n, n + m).
  const int n = h.num_vertices;
  std::vector<int> parent(n + h.edges.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    for (int v : h.edges[e].members()) {
      int a = find(v), b = find(n + static_cast<int>(e));
      if (a == b) return false;
      parent[a] = b;
    }
  }
  return true;
}

std::optional<std::vector<int>> statistics_topological_order(const std::vector<Dependency>& deps,
                                                             int num_vars) {
  std::vector<VarSet> succ(num_vars);
  for (const auto& d : deps)
    for (int u : d.cond.members()) succ[u] = succ[u] | (d.target - d.cond);
  std::vector<int> indegree(num_vars, 0);
  for (int u = 0; u < num_vars; ++u)
    for (int v : succ[u].members()) ++indegree[v];

  std::vector<int> order;
  VarSet placed;
  while (static_cast<int>(order.size()) < num_vars) {
    int next = -1;
    for (int v = 0; v < num_vars; ++v)
      if (!placed.contains(v) && indegree[v] == 0) {
        next = v;
        break;
      }
    if (next < 0) return std::nullopt;
    placed = placed.with(next);
    order.push_back(next);
    for (int v : succ[next].members()) --indegree[v];
  }
  return order;
}

}  // namespace pce

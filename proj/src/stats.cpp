#include "pce/stats.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pce/error.hpp"
#include "pce/format.hpp"

namespace pce {

DegreeSequence degree_sequence(const Relation& r, const std::vector<std::string>& cond,
                               const std::vector<std::string>& target) {
  auto cond_cols = r.attribute_indices(cond);
  auto target_cols = r.attribute_indices(target);
  std::sort(cond_cols.begin(), cond_cols.end());
  cond_cols.erase(std::unique(cond_cols.begin(), cond_cols.end()), cond_cols.end());
  std::vector<int> columns = cond_cols;
  for (int t : target_cols)
    if (std::find(columns.begin(), columns.end(), t) == columns.end()) columns.push_back(t);

  // Sorted with the U columns first, so each U-group is a contiguous block.
  auto rows = project(r.rows(), columns);
  DegreeSequence ds{r.name(), cond, target, {}};
  const std::size_t key = cond_cols.size();
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i + 1;
    while (j < rows.size() && std::equal(rows[i].begin(), rows[i].begin() + key, rows[j].begin())) ++j;
    ds.degrees.push_back(static_cast<std::int64_t>(j - i));
    i = j;
  }
  std::sort(ds.degrees.begin(), ds.degrees.end(), std::greater<>());
  return ds;
}

std::vector<NormOrder> default_norm_orders() {
  return {NormOrder(1), NormOrder(2), NormOrder(3), NormOrder(4), NormOrder::infinity()};
}

std::vector<StatEntry> build_global_stats(const Relation& r, const std::vector<std::string>& cond,
                                          const std::vector<std::string>& target,
                                          const std::vector<NormOrder>& ps) {
  auto ds = degree_sequence(r, cond, target);
  std::vector<StatEntry> out;
  for (auto p : ps) out.push_back({r.name(), cond, target, p, lp_norm(ds, p), StatCondition::global(), {}});
  return out;
}

std::vector<StatEntry> build_conditional_stats(const Relation& r, const std::string& cond_attr,
                                               const std::vector<std::string>& cond,
                                               const std::vector<std::string>& target,
                                               const std::vector<NormOrder>& ps, int mcv_count, int buckets) {
  if (mcv_count < 0) throw InputError("mcv_count must be nonnegative");
  if (buckets < 0) throw InputError("buckets must be nonnegative");
  buckets = std::min(buckets, kMaxBuckets);
  const auto attr = r.attribute_indices({cond_attr}).front();
  r.attribute_indices(cond);
  r.attribute_indices(target);

  std::map<Value, std::vector<Tuple>> groups;
  for (const auto& row : r.rows()) groups[row[attr]].push_back(row);

  struct Group {
    Value value;
    std::size_t frequency;
    std::vector<double> norms;  // parallel to ps
  };
  std::vector<Group> all;
  for (auto& [value, rows] : groups) {
    Relation slice(r.name(), r.attributes(), std::move(rows));
    auto ds = degree_sequence(slice, cond, target);
    Group g{value, slice.size(), {}};
    for (auto p : ps) g.norms.push_back(lp_norm(ds, p));
    all.push_back(std::move(g));
  }

  std::vector<Group> ranked = all;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Group& a, const Group& b) { return a.frequency > b.frequency; });
  const std::size_t num_mcv = std::min<std::size_t>(mcv_count, ranked.size());

  std::vector<StatEntry> out;
  auto emit = [&](std::size_t k, double value, StatCondition c, std::optional<double> range = {}) {
    out.push_back({r.name(), cond, target, ps[k], value, std::move(c), range});
  };
  for (std::size_t i = 0; i < num_mcv; ++i)
    for (std::size_t k = 0; k < ps.size(); ++k)
      emit(k, ranked[i].norms[k], StatCondition::mcv(cond_attr, ranked[i].value));

  // Remaining values, back in value order.
  std::vector<Group> rest(ranked.begin() + num_mcv, ranked.end());
  std::sort(rest.begin(), rest.end(), [](const Group& a, const Group& b) { return a.value < b.value; });
  if (rest.empty()) return out;

  for (std::size_t k = 0; k < ps.size(); ++k) {
    double m = 0;
    for (const auto& g : rest) m = std::max(m, g.norms[k]);
    emit(k, m, StatCondition::common(cond_attr));
  }

  const std::size_t num_buckets = std::min<std::size_t>(buckets, rest.size());
  if (num_buckets == 0) return out;
  std::size_t total = 0;
  for (const auto& g : rest) total += g.frequency;

  std::size_t begin = 0, seen = 0;
  for (std::size_t b = 0; b < num_buckets; ++b) {
    std::size_t end = begin;
    const std::size_t must_leave = num_buckets - b - 1;
    const double target_depth = static_cast<double>(total) * static_cast<double>(b + 1) / num_buckets;
    do {
      seen += rest[end].frequency;
      ++end;
    } while (end < rest.size() - must_leave && static_cast<double>(seen) < target_depth);
    if (b + 1 == num_buckets) {
      for (; end < rest.size(); ++end) seen += rest[end].frequency;
    }

    std::vector<Value> members;
    for (std::size_t i = begin; i < end; ++i) members.push_back(rest[i].value);
    Relation slice = r.select(attr, [&](const Value& v) { return std::binary_search(members.begin(), members.end(), v); });
    auto whole = degree_sequence(slice, cond, target);
    for (std::size_t k = 0; k < ps.size(); ++k) {
      double m = 0;
      for (std::size_t i = begin; i < end; ++i) m = std::max(m, rest[i].norms[k]);
      emit(k, m, StatCondition::bucket(cond_attr, rest[begin].value, rest[end - 1].value), lp_norm(whole, ps[k]));
    }
    begin = end;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Predicates

namespace {

class PredicateParser {
 public:
  explicit PredicateParser(std::string_view text) : text_(text) {}

  PredicateExpr parse() {
    skip();
    if (pos_ == text_.size()) return PredicateExpr::none();
    auto e = disjunction();
    skip();
    if (pos_ != text_.size()) throw ParseError("unexpected input in predicate", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  static bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

  bool keyword(std::string_view kw) {
    skip();
    if (text_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i)
      if (std::tolower(static_cast<unsigned char>(text_[pos_ + i])) != kw[i]) return false;
    if (pos_ + kw.size() < text_.size() && word_char(text_[pos_ + kw.size()])) return false;
    pos_ += kw.size();
    return true;
  }

  bool symbol(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!symbol(c)) throw ParseError(std::string("expected '") + c + "' in predicate", pos_);
  }

  std::string word() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && word_char(text_[pos_])) ++pos_;
    if (start == pos_) throw ParseError("expected a name or value in predicate", pos_);
    return std::string(text_.substr(start, pos_ - start));
  }

  Value value() {
    skip();
    if (pos_ < text_.size() && (text_[pos_] == '\'' || text_[pos_] == '"')) {
      char quote = text_[pos_++];
      std::string s;
      while (pos_ < text_.size() && text_[pos_] != quote) s += text_[pos_++];
      if (pos_ == text_.size()) throw ParseError("unterminated string in predicate", pos_);
      ++pos_;
      return s;
    }
    return parse_value(word());
  }

  PredicateExpr disjunction() {
    std::vector<PredicateExpr> parts{conjunction()};
    while (keyword("or")) parts.push_back(conjunction());
    return parts.size() == 1 ? std::move(parts[0]) : PredicateExpr::any_of(std::move(parts));
  }

  PredicateExpr conjunction() {
    std::vector<PredicateExpr> parts{primary()};
    while (keyword("and")) parts.push_back(primary());
    return parts.size() == 1 ? std::move(parts[0]) : PredicateExpr::all_of(std::move(parts));
  }

  PredicateExpr primary() {
    if (symbol('(')) {
      auto e = disjunction();
      expect(')');
      return e;
    }
    std::string relation, attr = word();
    if (symbol('.')) {
      relation = attr;
      attr = word();
    }
    PredicateExpr e;
    if (symbol('=')) {
      e = PredicateExpr::eq(attr, value());
    } else if (keyword("in")) {
      expect('(');
      std::vector<Value> vs{value()};
      while (symbol(',')) vs.push_back(value());
      expect(')');
      e = PredicateExpr::in(attr, std::move(vs));
    } else {
      throw ParseError("expected '=' or 'in' after " + attr, pos_);
    }
    e.relation = relation;
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string quoted(const Value& v) {
  if (std::holds_alternative<std::int64_t>(v)) return to_string(v);
  return "'" + std::get<std::string>(v) + "'";
}

}  // namespace

PredicateExpr parse_predicate(std::string_view text) { return PredicateParser(text).parse(); }

std::string to_string(const PredicateExpr& e) {
  std::string name = e.relation.empty() ? e.attr : e.relation + "." + e.attr;
  switch (e.kind) {
    case PredicateExpr::Kind::none: return "";
    case PredicateExpr::Kind::eq: return name + "=" + quoted(e.values.at(0));
    case PredicateExpr::Kind::in: {
      std::string s = name + " in (";
      for (std::size_t i = 0; i < e.values.size(); ++i) s += (i ? "," : "") + quoted(e.values[i]);
      return s + ")";
    }
    case PredicateExpr::Kind::and_:
    case PredicateExpr::Kind::or_: {
      std::string sep = e.kind == PredicateExpr::Kind::and_ ? " and " : " or ";
      std::string s = "(";
      for (std::size_t i = 0; i < e.children.size(); ++i) s += (i ? sep : "") + to_string(e.children[i]);
      return s + ")";
    }
  }
  return "";
}

namespace {

struct StatSelector {
  const StatisticsCatalog& catalog;
  const std::string& relation;
  const std::vector<std::string>& cond;
  const std::vector<std::string>& target;
  NormOrder p;
  double global;

  double eq(const std::string& attr, const Value& a) const {
    if (auto* e = catalog.find(relation, cond, target, p, StatCondition::mcv(attr, a))) return e->value;
    if (auto* e = catalog.find(relation, cond, target, p, StatCondition::common(attr))) return e->value;
    auto norm_cond = normalize_attrs(cond);
    for (const auto* e : catalog.entries_for(relation, StatCondition::Kind::bucket)) {
      const auto& c = e->condition;
      if (c.attr == attr && e->p == p && e->cond == norm_cond && catalog.find(relation, cond, target, p, c) == e &&
          c.lo <= a && a <= c.hi)
        return e->value;
    }
    return global;
  }

  void require_minkowski() const {
    if (p.value() < 1)
      throw StatisticsError("or-combination of statistics needs p >= 1, got p=" + to_string(p));
  }

  double eval(const PredicateExpr& e) const {
    if (!e.relation.empty() && e.relation != relation && e.kind != PredicateExpr::Kind::and_ &&
        e.kind != PredicateExpr::Kind::or_)
      return global;
    switch (e.kind) {
      case PredicateExpr::Kind::none: return global;
      case PredicateExpr::Kind::eq: return eq(e.attr, e.values.at(0));
      case PredicateExpr::Kind::in: {
        if (e.values.size() > 1) require_minkowski();
        double sum = 0;
        for (const auto& v : e.values) sum += eq(e.attr, v);
        return sum;
      }
      case PredicateExpr::Kind::and_: {
        double m = INFINITY;
        for (const auto& c : e.children) m = std::min(m, eval(c));
        return e.children.empty() ? global : m;
      }
      case PredicateExpr::Kind::or_: {
        require_minkowski();
        double sum = 0;
        for (const auto& c : e.children) sum += eval(c);
        return e.children.empty() ? global : sum;
      }
    }
    return global;
  }
};

}  // namespace

double select_stat(const StatisticsCatalog& c, const std::string& relation, const std::vector<std::string>& cond,
                   const std::vector<std::string>& target, NormOrder p, const PredicateExpr& pred) {
  const auto* g = c.find(relation, cond, target, p);
  if (!g) throw StatisticsError("no global statistic ||deg_" + relation + "(...)||_" + to_string(p));
  return StatSelector{c, relation, cond, target, p, g->value}.eval(pred);
}

// ---------------------------------------------------------------------------
// Config-driven catalog build

namespace {

using nlohmann::json;

std::vector<NormOrder> norm_orders_from_json(const json& j) {
  std::vector<NormOrder> out;
  for (const auto& p : j) out.push_back(p.is_string() ? NormOrder::parse(p.get<std::string>()) : NormOrder(p.get<double>()));
  return out;
}

void add_if_absent(StatisticsCatalog& c, StatEntry e) {
  if (!c.find(e.relation, e.cond, e.target, e.p, e.condition)) c.add(std::move(e));
}

void add_sequence(StatisticsCatalog& c, const Relation& r, const std::vector<std::string>& cond,
                  const std::vector<std::string>& target, int max_runs) {
  if (c.find_sequence(r.name(), cond, target)) return;
  auto ds = degree_sequence(r, cond, target);
  auto seq = max_runs == 0 ? run_length_compress(ds) : cdf_upper_compress(ds, max_runs);
  c.add(SequenceEntry{r.name(), cond, target, std::move(seq)});
}

std::vector<std::string> others(const Relation& r, const std::vector<std::string>& except) {
  std::vector<std::string> out;
  for (const auto& a : r.attributes())
    if (std::find(except.begin(), except.end(), a) == except.end()) out.push_back(a);
  return out;
}

}  // namespace

StatsConfig parse_stats_config(const std::string& json_text) {
  try {
    auto doc = json::parse(json_text);
    StatsConfig cfg;
    for (const auto& jr : doc.at("relations")) {
      RelationSpec rs;
      rs.name = jr.at("name");
      rs.file = jr.value("file", rs.name + ".csv");
      rs.header = jr.value("header", true);
      rs.simple = jr.value("simple", false);
      rs.simple_max_runs = jr.value("simple_max_runs", 32);
      if (jr.contains("statistics")) {
        for (const auto& js : jr["statistics"]) {
          StatisticSpec s;
          s.cond = js.value("cond", std::vector<std::string>{});
          s.target = js.at("target").get<std::vector<std::string>>();
          s.ps = js.contains("p") ? norm_orders_from_json(js["p"]) : default_norm_orders();
          s.cond_attr = js.value("cond_attr", "");
          s.mcv_count = js.value("mcv_count", 0);
          s.buckets = js.value("buckets", 0);
          s.max_runs = js.value("max_runs", -1);
          rs.statistics.push_back(std::move(s));
        }
      }
      cfg.relations.push_back(std::move(rs));
    }
    return cfg;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed stats config: ") + e.what(), e.byte);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid stats config: ") + e.what());
  }
}

StatsConfig load_stats_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read stats config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_stats_config(buf.str());
}

void add_relation_statistics(StatisticsCatalog& c, const Relation& r, const RelationSpec& spec) {
  c.set_schema(r.name(), r.attributes());
  add_if_absent(c, build_global_stats(r, {}, r.attributes(), {NormOrder(1)}).front());

  // Explicit requests go first so their max_runs wins over the simple defaults.
  for (const auto& s : spec.statistics) {
    for (auto& e : build_global_stats(r, s.cond, s.target, s.ps)) add_if_absent(c, std::move(e));
    if (!s.cond_attr.empty())
      for (auto& e : build_conditional_stats(r, s.cond_attr, s.cond, s.target, s.ps, s.mcv_count, s.buckets))
        add_if_absent(c, std::move(e));
    if (s.max_runs >= 0) add_sequence(c, r, s.cond, s.target, s.max_runs);
  }

  if (spec.simple) {
    const auto ps = default_norm_orders();
    for (const auto& x : r.attributes()) {
      add_if_absent(c, build_global_stats(r, {}, {x}, {NormOrder(1)}).front());
      if (r.arity() == 1) continue;
      for (auto& e : build_global_stats(r, {x}, others(r, {x}), ps)) add_if_absent(c, std::move(e));
      for (const auto& y : others(r, {x}))
        for (auto& e : build_global_stats(r, {x}, {y}, ps)) add_if_absent(c, std::move(e));
      add_sequence(c, r, {x}, others(r, {x}), spec.simple_max_runs);
    }
  }
}

StatisticsCatalog build_catalog(const StatsConfig& config, const std::string& data_dir,
                                std::map<std::string, double>* seconds) {
  struct Part {
    StatisticsCatalog stats;
    std::string path;
    std::string digest;
    double seconds = 0;
  };
  std::vector<std::future<Part>> workers;
  for (const auto& spec : config.relations) {
    workers.push_back(std::async(std::launch::async, [&spec, &data_dir] {
      const auto start = std::chrono::steady_clock::now();
      auto path = (std::filesystem::path(data_dir) / spec.file).string();
      auto r = load_csv(path, spec.name, spec.header);
      Part part;
      add_relation_statistics(part.stats, r, spec);
      part.path = std::filesystem::absolute(path).lexically_normal().string();
      part.digest = file_digest(path);
      part.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return part;
    }));
  }

  StatisticsCatalog out;
  for (std::size_t i = 0; i < workers.size(); ++i) {
    auto part = workers[i].get();
    const auto& spec = config.relations[i];
    if (out.schemas().count(spec.name)) throw InputError("relation " + spec.name + " configured twice");
    for (const auto& [name, attrs] : part.stats.schemas()) out.set_schema(name, attrs);
    for (const auto& e : part.stats.entries()) out.add(e);
    for (const auto& s : part.stats.sequences()) out.add(s);
    out.meta().digests[part.path] = part.digest;
    if (seconds) (*seconds)[spec.name] = part.seconds;
  }
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out.meta().built_at = stamp;
  return out;
}

}  // namespace pce

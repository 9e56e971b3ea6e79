#include "pce/catalog.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pce/error.hpp"
#include "pce/format.hpp"

namespace pce {

using nlohmann::json;

std::string to_string(StatCondition::Kind k) {
  switch (k) {
    case StatCondition::Kind::global: return "global";
    case StatCondition::Kind::mcv: return "mcv";
    case StatCondition::Kind::common: return "common";
    case StatCondition::Kind::bucket: return "bucket";
  }
  return "?";
}

std::vector<std::string> normalize_attrs(std::vector<std::string> attrs) {
  std::sort(attrs.begin(), attrs.end());
  attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
  return attrs;
}

namespace {

bool same_key(const StatEntry& a, const StatEntry& b) {
  return a.relation == b.relation && a.cond == b.cond && a.target == b.target && a.p == b.p &&
         a.condition == b.condition;
}

void normalize(std::vector<std::string>& cond, std::vector<std::string>& target) {
  cond = normalize_attrs(std::move(cond));
  target = normalize_attrs(std::move(target));
  std::erase_if(target, [&](const std::string& t) { return std::binary_search(cond.begin(), cond.end(), t); });
}

}  // namespace

void StatisticsCatalog::set_schema(const std::string& relation, std::vector<std::string> attributes) {
  schemas_[relation] = std::move(attributes);
}

const std::vector<std::string>& StatisticsCatalog::schema(const std::string& relation) const {
  auto it = schemas_.find(relation);
  if (it == schemas_.end()) throw StatisticsError("catalog has no schema for relation " + relation);
  return it->second;
}

void StatisticsCatalog::add(StatEntry e) {
  normalize(e.cond, e.target);
  if (!(e.value >= 0)) throw InputError("statistic value must be nonnegative");
  for (const auto& x : entries_)
    if (same_key(x, e)) throw InputError("duplicate statistic for relation " + e.relation);
  entries_.push_back(std::move(e));
}

void StatisticsCatalog::add(SequenceEntry e) {
  normalize(e.cond, e.target);
  if (find_sequence(e.relation, e.cond, e.target))
    throw InputError("duplicate degree sequence for relation " + e.relation);
  sequences_.push_back(std::move(e));
}

const StatEntry* StatisticsCatalog::find(const std::string& relation, std::vector<std::string> cond,
                                         std::vector<std::string> target, NormOrder p,
                                         const StatCondition& condition) const {
  normalize(cond, target);
  for (const auto& e : entries_)
    if (e.relation == relation && e.cond == cond && e.target == target && e.p == p && e.condition == condition)
      return &e;
  return nullptr;
}

const SequenceEntry* StatisticsCatalog::find_sequence(const std::string& relation,
                                                      std::vector<std::string> cond,
                                                      std::vector<std::string> target) const {
  normalize(cond, target);
  for (const auto& e : sequences_)
    if (e.relation == relation && e.cond == cond && e.target == target) return &e;
  return nullptr;
}

std::vector<const StatEntry*> StatisticsCatalog::entries_for(const std::string& relation,
                                                             StatCondition::Kind kind) const {
  std::vector<const StatEntry*> out;
  for (const auto& e : entries_)
    if (e.relation == relation && e.condition.kind == kind) out.push_back(&e);
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json value_to_json(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  return std::get<std::string>(v);
}

Value value_from_json(const json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return j.get<std::string>();
  throw ParseError("catalog value must be an integer or a string", 0);
}

json condition_to_json(const StatCondition& c) {
  json j{{"kind", to_string(c.kind)}};
  if (c.kind != StatCondition::Kind::global) j["attr"] = c.attr;
  if (c.kind == StatCondition::Kind::mcv) j["value"] = value_to_json(c.value);
  if (c.kind == StatCondition::Kind::bucket) {
    j["lo"] = value_to_json(c.lo);
    j["hi"] = value_to_json(c.hi);
  }
  return j;
}

StatCondition condition_from_json(const json& j) {
  auto kind = j.at("kind").get<std::string>();
  if (kind == "global") return StatCondition::global();
  if (kind == "mcv") return StatCondition::mcv(j.at("attr"), value_from_json(j.at("value")));
  if (kind == "common") return StatCondition::common(j.at("attr"));
  if (kind == "bucket")
    return StatCondition::bucket(j.at("attr"), value_from_json(j.at("lo")), value_from_json(j.at("hi")));
  throw ParseError("unknown condition kind '" + kind + "'", 0);
}

}  // namespace

std::string catalog_to_json(const StatisticsCatalog& c) {
  json entries = json::array();
  for (const auto& e : c.entries()) {
    json j{{"relation", e.relation},
           {"cond", e.cond},
           {"target", e.target},
           {"p", to_string(e.p)},
           {"value", exact_decimal(e.value)},
           {"condition", condition_to_json(e.condition)}};
    if (e.range_value) j["range_value"] = exact_decimal(*e.range_value);
    entries.push_back(std::move(j));
  }
  json sequences = json::array();
  for (const auto& s : c.sequences()) {
    json runs = json::array();
    for (const auto& r : s.sequence.runs) runs.push_back(json::array({exact_decimal(r.value), r.length}));
    sequences.push_back({{"relation", s.relation},
                         {"cond", s.cond},
                         {"target", s.target},
                         {"certified", s.sequence.cdf_certified},
                         {"runs", std::move(runs)}});
  }
  json doc{{"version", StatisticsCatalog::kVersion},
           {"meta", {{"built_at", c.meta().built_at}, {"digests", c.meta().digests}}},
           {"relations", c.schemas()},
           {"entries", std::move(entries)},
           {"sequences", std::move(sequences)}};
  return doc.dump(2) + "\n";
}

StatisticsCatalog catalog_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed catalog: ") + e.what(), e.byte);
  }
  try {
    if (!doc.contains("version") || doc.at("version") != StatisticsCatalog::kVersion)
      throw InputError("unsupported catalog version " + (doc.contains("version") ? doc["version"].dump() : "(none)"));
    StatisticsCatalog c;
    if (doc.contains("meta")) {
      c.meta().built_at = doc["meta"].value("built_at", "");
      if (doc["meta"].contains("digests"))
        c.meta().digests = doc["meta"]["digests"].get<std::map<std::string, std::string>>();
    }
    if (doc.contains("relations"))
      for (const auto& [name, attrs] : doc["relations"].items())
        c.set_schema(name, attrs.get<std::vector<std::string>>());
    for (const auto& j : doc.at("entries")) {
      StatEntry e;
      e.relation = j.at("relation");
      e.cond = j.at("cond").get<std::vector<std::string>>();
      e.target = j.at("target").get<std::vector<std::string>>();
      e.p = NormOrder::parse(j.at("p").get<std::string>());
      e.value = parse_decimal(j.at("value").get<std::string>());
      e.condition = condition_from_json(j.at("condition"));
      if (j.contains("range_value")) e.range_value = parse_decimal(j["range_value"].get<std::string>());
      c.add(std::move(e));
    }
    if (doc.contains("sequences")) {
      for (const auto& j : doc["sequences"]) {
        SequenceEntry s;
        s.relation = j.at("relation");
        s.cond = j.at("cond").get<std::vector<std::string>>();
        s.target = j.at("target").get<std::vector<std::string>>();
        s.sequence.cdf_certified = j.value("certified", false);
        for (const auto& r : j.at("runs"))
          s.sequence.runs.push_back({parse_decimal(r.at(0).get<std::string>()), r.at(1).get<std::int64_t>()});
        c.add(std::move(s));
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed catalog: ") + e.what(), 0);
  }
}

void save_catalog(const StatisticsCatalog& c, const std::string& path) {
  std::string text = catalog_to_json(c);
  // Write to a sibling temp file first so a failed run leaves no partial catalog.
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InputError("cannot write catalog " + path);
    out << text;
    if (!out) throw InputError("cannot write catalog " + path);
  }
  std::filesystem::rename(tmp, path);
}

StatisticsCatalog load_catalog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read catalog " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return catalog_from_json(buf.str());
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_started = false;
  std::size_t i = 0;
  auto end_record = [&] {
    if (field_started || !record.empty()) {
      record.push_back(std::move(field));
      records.push_back(std::move(record));
    }
    record.clear();
    field.clear();
    field_started = false;
  };
  while (i < text.size()) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      field += c;
      field_started = true;
    }
    ++i;
  }
  if (quoted) throw ParseError("unterminated quoted CSV field", i);
  end_record();
  return records;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos && !s.empty()) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Relation load_csv(const std::string& path, const std::string& name, bool header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  auto records = parse_csv(buf.str());
  if (records.empty()) throw InputError(path + " is empty");

  std::vector<std::string> attrs;
  std::size_t first = 0;
  if (header) {
    attrs = records[0];
    first = 1;
  } else {
    for (std::size_t k = 0; k < records[0].size(); ++k) attrs.push_back("A" + std::to_string(k + 1));
  }
  std::vector<Tuple> rows;
  for (std::size_t r = first; r < records.size(); ++r) {
    if (records[r].size() != attrs.size())
      throw InputError(path + ": record " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                       " fields, expected " + std::to_string(attrs.size()));
    Tuple t;
    for (const auto& f : records[r]) t.push_back(parse_value(f));
    rows.push_back(std::move(t));
  }
  return Relation(name, std::move(attrs), std::move(rows));
}

void write_csv(const Relation& r, const std::string& path, bool header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << csv_field(fields[i]);
    out << "\n";
  };
  if (header) line(r.attributes());
  for (const auto& row : r.rows()) {
    std::vector<std::string> fields;
    for (const auto& v : row) fields.push_back(to_string(v));
    line(fields);
  }
}

Database load_database(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  if (ec) throw InputError("cannot list " + dir + ": " + ec.message());
  std::sort(files.begin(), files.end());
  Database db;
  for (const auto& f : files) db.add(load_csv(f.string(), f.stem().string(), true));
  return db;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + hex;
}

}  // namespace pce

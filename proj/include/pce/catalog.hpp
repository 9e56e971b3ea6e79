#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pce/degree_sequence.hpp"
#include "pce/relation.hpp"

namespace pce {

/// Which slice of the relation a statistic describes.
struct StatCondition {
  enum class Kind { global, mcv, common, bucket };

  Kind kind = Kind::global;
  std::string attr;  // empty for global
  Value value;       // mcv only
  Value lo, hi;      // bucket only, inclusive

  static StatCondition global() { return {}; }
  static StatCondition mcv(std::string attr, Value v) { return {Kind::mcv, std::move(attr), std::move(v), {}, {}}; }
  static StatCondition common(std::string attr) { return {Kind::common, std::move(attr), {}, {}, {}}; }
  static StatCondition bucket(std::string attr, Value lo, Value hi) {
    return {Kind::bucket, std::move(attr), {}, std::move(lo), std::move(hi)};
  }

  friend bool operator==(const StatCondition&, const StatCondition&) = default;
};

std::string to_string(StatCondition::Kind k);

/// One norm ||deg_R(target | cond)||_p, optionally restricted by a condition.
/// Attribute lists are kept sorted and disjoint (target excludes cond).
struct StatEntry {
  std::string relation;
  std::vector<std::string> cond;
  std::vector<std::string> target;
  NormOrder p{1.0};
  double value = 0;
  StatCondition condition;
  /// Bucket entries also carry the norm over the whole bucket,
  /// ||deg_R(target | cond, A in bucket)||_p.
  std::optional<double> range_value;

  friend bool operator==(const StatEntry&, const StatEntry&) = default;
};

/// A stored degree sequence deg_R(target | cond), possibly CDF-compressed.
struct SequenceEntry {
  std::string relation;
  std::vector<std::string> cond;
  std::vector<std::string> target;
  CompressedDegreeSequence sequence;

  friend bool operator==(const SequenceEntry&, const SequenceEntry&) = default;
};

struct CatalogMeta {
  std::string built_at;
  /// Absolute data file path -> content digest.
  std::map<std::string, std::string> digests;

  friend bool operator==(const CatalogMeta&, const CatalogMeta&) = default;
};

class StatisticsCatalog {
 public:
  static constexpr int kVersion = 1;

  /// Throws InputError if an entry with the same key exists.
  void add(StatEntry e);
  void add(SequenceEntry e);

  /// Records the attribute list of a relation; statistics are mapped onto
  /// query atoms through it.
  void set_schema(const std::string& relation, std::vector<std::string> attributes);
  /// Throws StatisticsError for relations the catalog knows nothing about.
  const std::vector<std::string>& schema(const std::string& relation) const;
  const std::map<std::string, std::vector<std::string>>& schemas() const { return schemas_; }

  const std::vector<StatEntry>& entries() const { return entries_; }
  const std::vector<SequenceEntry>& sequences() const { return sequences_; }
  CatalogMeta& meta() { return meta_; }
  const CatalogMeta& meta() const { return meta_; }

  /// Exact key lookup; attribute lists in any order.
  const StatEntry* find(const std::string& relation, std::vector<std::string> cond,
                        std::vector<std::string> target, NormOrder p,
                        const StatCondition& condition = StatCondition::global()) const;
  const SequenceEntry* find_sequence(const std::string& relation, std::vector<std::string> cond,
                                     std::vector<std::string> target) const;

  /// Entries of one relation with the given condition kind.
  std::vector<const StatEntry*> entries_for(const std::string& relation,
                                            StatCondition::Kind kind = StatCondition::Kind::global) const;

  friend bool operator==(const StatisticsCatalog&, const StatisticsCatalog&) = default;

 private:
  std::map<std::string, std::vector<std::string>> schemas_;
  std::vector<StatEntry> entries_;
  std::vector<SequenceEntry> sequences_;
  CatalogMeta meta_;
};

/// Sorted, duplicate-free copy.
std::vector<std::string> normalize_attrs(std::vector<std::string> attrs);

void save_catalog(const StatisticsCatalog& c, const std::string& path);
StatisticsCatalog load_catalog(const std::string& path);
std::string catalog_to_json(const StatisticsCatalog& c);
StatisticsCatalog catalog_from_json(const std::string& text);

/// Comma-separated, double-quote escaping. Attributes come from the header row
/// or are named A1..Ak. Integer-looking fields become integers.
Relation load_csv(const std::string& path, const std::string& name, bool header);
void write_csv(const Relation& r, const std::string& path, bool header = true);

/// Every *.csv file in `dir`, with header rows, named by file stem.
Database load_database(const std::string& dir);

/// "fnv1a64:<hex>" over the file contents.
std::string file_digest(const std::string& path);

}  // namespace pce

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pce {

/// An attribute value. Integers order before strings; strings compare
/// lexicographically.
using Value = std::variant<std::int64_t, std::string>;
using Tuple = std::vector<Value>;

std::string to_string(const Value& v);

/// Integer if the text looks like one, string otherwise.
Value parse_value(const std::string& text);

/// A named finite set of tuples over a fixed attribute list.
class Relation {
 public:
  Relation() = default;

  /// Validates arity and collapses duplicate rows.
  Relation(std::string name, std::vector<std::string> attributes, std::vector<Tuple> rows);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& attributes() const { return attributes_; }
  int arity() const { return static_cast<int>(attributes_.size()); }

  /// Rows, sorted and distinct.
  const std::vector<Tuple>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  std::optional<int> attribute_index(const std::string& attr) const;
  /// Throws InputError for unknown names.
  std::vector<int> attribute_indices(const std::vector<std::string>& attrs) const;

  /// Rows where `attr` satisfies `keep`, same schema.
  template <typename Pred>
  Relation select(int attr, Pred keep) const {
    std::vector<Tuple> out;
    for (const auto& row : rows_)
      if (keep(row[attr])) out.push_back(row);
    return Relation(name_, attributes_, std::move(out));
  }

 private:
  std::string name_;
  std::vector<std::string> attributes_;
  std::vector<Tuple> rows_;
};

/// Projection of `rows` onto `columns`, sorted and distinct.
std::vector<Tuple> project(const std::vector<Tuple>& rows, const std::vector<int>& columns);

/// A named collection of relations.
struct Database {
  std::map<std::string, Relation> relations;

  const Relation& at(const std::string& name) const;
  void add(Relation r);
};

}  // namespace pce

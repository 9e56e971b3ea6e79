#include "pce/relation.hpp"

#include <algorithm>
#include <charconv>

#include "pce/error.hpp"

namespace pce {

std::string to_string(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

Value parse_value(const std::string& text) {
  std::int64_t out = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') return text;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec == std::errc() && ptr == last && !text.empty()) return out;
  return text;
}

Relation::Relation(std::string name, std::vector<std::string> attributes, std::vector<Tuple> rows)
    : name_(std::move(name)), attributes_(std::move(attributes)), rows_(std::move(rows)) {
  for (std::size_t i = 0; i < attributes_.size(); ++i)
    for (std::size_t j = i + 1; j < attributes_.size(); ++j)
      if (attributes_[i] == attributes_[j])
        throw InputError("relation " + name_ + ": duplicate attribute " + attributes_[i]);
  for (const auto& row : rows_)
    if (row.size() != attributes_.size())
      throw InputError("relation " + name_ + ": row of arity " + std::to_string(row.size()) +
                       ", expected " + std::to_string(attributes_.size()));
  std::sort(rows_.begin(), rows_.end());
  rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());
}

std::optional<int> Relation::attribute_index(const std::string& attr) const {
  auto it = std::find(attributes_.begin(), attributes_.end(), attr);
  if (it == attributes_.end()) return std::nullopt;
  return static_cast<int>(it - attributes_.begin());
}

std::vector<int> Relation::attribute_indices(const std::vector<std::string>& attrs) const {
  std::vector<int> out;
  out.reserve(attrs.size());
  for (const auto& a : attrs) {
    auto idx = attribute_index(a);
    if (!idx) throw InputError("relation " + name_ + " has no attribute " + a);
    out.push_back(*idx);
  }
  return out;
}

std::vector<Tuple> project(const std::vector<Tuple>& rows, const std::vector<int>& columns) {
  std::vector<Tuple> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    Tuple t;
    t.reserve(columns.size());
    for (int c : columns) t.push_back(row[c]);
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const Relation& Database::at(const std::string& name) const {
  auto it = relations.find(name);
  if (it == relations.end()) throw InputError("unknown relation " + name);
  return it->second;
}

void Database::add(Relation r) {
  auto name = r.name();
  if (!relations.emplace(name, std::move(r)).second)
    throw InputError("duplicate relation " + name);
}

}  // namespace pce

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pce/relation.hpp"

namespace pce::test {

inline std::string fixture(const std::string& rel) { return std::string(PCE_FIXTURES) + "/" + rel; }

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pce-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// The eight-tuple relation R(X,Y,Z) used throughout the degree-sequence
/// examples.
inline Relation example_relation() {
  auto row = [](std::int64_t x, const char* y, const char* z) { return Tuple{x, std::string(y), std::string(z)}; };
  return Relation("R", {"X", "Y", "Z"},
                  {row(1, "a", "p"), row(1, "b", "p"), row(1, "b", "q"), row(2, "a", "q"), row(2, "b", "r"),
                   row(3, "b", "p"), row(3, "c", "q"), row(4, "d", "r")});
}

/// All four pairs over {0,1}.
inline Relation complete_pairs(const std::string& name) {
  std::vector<Tuple> rows;
  for (std::int64_t a = 0; a < 2; ++a)
    for (std::int64_t b = 0; b < 2; ++b) rows.push_back({a, b});
  return Relation(name, {"A", "B"}, rows);
}

inline Relation pairs(const std::string& name, const std::vector<std::pair<std::int64_t, std::int64_t>>& ps) {
  std::vector<Tuple> rows;
  for (auto [a, b] : ps) rows.push_back({a, b});
  return Relation(name, {"A", "B"}, rows);
}

inline bool close(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace pce::test

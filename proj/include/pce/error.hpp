#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pce {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed query, predicate, CSV or catalog text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Bad input that parsed fine: unknown attributes, arity mismatches, unreadable files.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A bound needs a statistic the catalog does not have, or the statistics
/// leave some variable unbounded.
class StatisticsError : public Error {
 public:
  using Error::Error;
};

/// The exact evaluator hit its intermediate-size cap.
class OracleCapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace pce

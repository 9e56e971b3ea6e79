#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace pce {

/// The order p of an lp-norm: a positive real or infinity.
class NormOrder {
 public:
  /// Throws InputError unless p > 0.
  explicit NormOrder(double p);
  static NormOrder infinity() { return NormOrder(std::numeric_limits<double>::infinity()); }

  /// Accepts a decimal number or "inf".
  static NormOrder parse(const std::string& text);

  double value() const { return p_; }
  bool is_infinite() const { return p_ == std::numeric_limits<double>::infinity(); }
  /// 1/p, zero for p = inf.
  double reciprocal() const { return is_infinite() ? 0.0 : 1.0 / p_; }

  friend bool operator==(NormOrder, NormOrder) = default;
  friend auto operator<=>(NormOrder a, NormOrder b) { return a.p_ <=> b.p_; }

 private:
  double p_;
};

/// "inf" or the shortest decimal that round-trips.
std::string to_string(NormOrder p);

/// deg_R(V|U): group sizes of the projection on U+V grouped by U, sorted
/// non-increasing. Every degree is at least one.
struct DegreeSequence {
  std::string relation;
  std::vector<std::string> cond;
  std::vector<std::string> target;
  std::vector<std::int64_t> degrees;

  std::size_t length() const { return degrees.size(); }
};

struct Run {
  double value = 0;
  std::int64_t length = 0;

  friend bool operator==(const Run&, const Run&) = default;
};

/// A run-length encoded sequence, possibly lossy. Lossy forms come from
/// cdf_upper_compress and dominate the CDF of the sequence they replace.
struct CompressedDegreeSequence {
  std::vector<Run> runs;
  /// Set when the CDF dominance against the source sequence was checked at
  /// build time.
  bool cdf_certified = false;

  std::int64_t length() const;
  /// Sum of all entries.
  double total() const;
  bool non_increasing() const;
  std::vector<double> expand() const;
  std::vector<double> cdf() const;

  friend bool operator==(const CompressedDegreeSequence&, const CompressedDegreeSequence&) = default;
};

/// (d1^p + ... + dn^p)^(1/p), evaluated in log space. Zero for an empty sequence.
double lp_norm(const DegreeSequence& ds, NormOrder p);
double lp_norm(const CompressedDegreeSequence& ds, NormOrder p);
/// Natural log of the norm; -inf for an empty or all-zero sequence.
double log_lp_norm(const DegreeSequence& ds, NormOrder p);
double log_lp_norm(const CompressedDegreeSequence& ds, NormOrder p);

/// Lossless: constant stretches become (value, length) runs.
CompressedDegreeSequence run_length_compress(const DegreeSequence& ds);

/// At most `max_runs` runs whose CDF dominates the CDF of `ds` at every index,
/// with the same total length and a first entry of at least d1. The output is
/// non-increasing. Identity when the sequence already fits.
CompressedDegreeSequence cdf_upper_compress(const DegreeSequence& ds, int max_runs);

/// Prefix sums of `compressed` are >= prefix sums of `original` at every index
/// of `original`; indices past the end of `compressed` count as zero entries.
bool cdf_dominates(const CompressedDegreeSequence& compressed, const std::vector<double>& original);

}  // namespace pce

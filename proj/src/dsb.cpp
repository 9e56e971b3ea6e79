#include "pce/dsb.hpp"

#include <algorithm>
#include <cmath>

#include "pce/error.hpp"

namespace pce {

namespace {

BoundResult from_sum(double sum, std::size_t terms) {
  if (sum <= 0) return {-std::numeric_limits<double>::infinity(), 0.0, SumWitness{terms}};
  return BoundResult::from_log(std::log(sum), SumWitness{terms});
}

std::vector<double> as_doubles(const DegreeSequence& ds) { return {ds.degrees.begin(), ds.degrees.end()}; }


}  // namespace

double rank_product_sum(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  long double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

double rank_product_sum(const CompressedDegreeSequence& a, const CompressedDegreeSequence& b) {
  long double s = 0;
  std::size_t i = 0, j = 0;
  std::int64_t left_a = a.runs.empty() ? 0 : a.runs[0].length;
  std::int64_t left_b = b.runs.empty() ? 0 : b.runs[0].length;
  while (i < a.runs.size() && j < b.runs.size()) {
    const std::int64_t overlap = std::min(left_a, left_b);
    s += static_cast<long double>(a.runs[i].value) * b.runs[j].value * overlap;
    left_a -= overlap;
    left_b -= overlap;
    if (left_a == 0 && ++i < a.runs.size()) left_a = a.runs[i].length;
    if (left_b == 0 && ++j < b.runs.size()) left_b = b.runs[j].length;
  }
  return static_cast<double>(s);
}

BoundResult dsb_join_bound(const DegreeSequence& a, const DegreeSequence& b) {
  const auto x = as_doubles(a), y = as_doubles(b);
  return from_sum(rank_product_sum(x, y), std::min(x.size(), y.size()));
}

BoundResult dsb_join_bound(const CompressedDegreeSequence& a, const CompressedDegreeSequence& b) {
  // Applying the summation-by-parts step on each side in turn needs one of
  // the two to be non-increasing.
  if (!a.non_increasing() && !b.non_increasing())
    throw StatisticsError("neither degree sequence is non-increasing");
  return from_sum(rank_product_sum(a, b), static_cast<std::size_t>(std::min(a.length(), b.length())));
}

BoundResult dsb_join_bound_compressed(const DegreeSequence& a_original, const CompressedDegreeSequence& a_compressed,
                                      const DegreeSequence& b) {
  if (!cdf_dominates(a_compressed, as_doubles(a_original)))
    throw StatisticsError("compressed sequence does not dominate the CDF of the original");
  if (!std::is_sorted(b.degrees.begin(), b.degrees.end(), std::greater<>()))
    throw StatisticsError("second degree sequence is not non-increasing");
  const auto x = a_compressed.expand();
  const auto y = as_doubles(b);
  return from_sum(rank_product_sum(x, y), std::min(x.size(), y.size()));
}

}  // namespace pce

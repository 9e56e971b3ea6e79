#pragma once

#include <span>

#include "pce/bound.hpp"
#include "pce/degree_sequence.hpp"

namespace pce {

/// sum_i a_i * b_i with the shorter sequence padded by zeros.
double rank_product_sum(std::span<const double> a, std::span<const double> b);

/// Same sum over run-length forms, one step per run boundary; no expansion.
double rank_product_sum(const CompressedDegreeSequence& a, const CompressedDegreeSequence& b);

/// Bound on |R(..Y..) join S(..Y..)| from deg_R(*|Y) and deg_S(*|Y).
/// Compressed inputs must dominate the CDF of the sequence they replace, and
/// at least one side must be non-increasing.
BoundResult dsb_join_bound(const DegreeSequence& a, const DegreeSequence& b);
BoundResult dsb_join_bound(const CompressedDegreeSequence& a, const CompressedDegreeSequence& b);

/// sum a''_i b_i where a'' replaces `a_original`. Checks that the CDF of
/// `a_compressed` dominates that of `a_original` and that `b` is
/// non-increasing, throwing StatisticsError otherwise; under those
/// conditions the result is at least sum a_i b_i.
BoundResult dsb_join_bound_compressed(const DegreeSequence& a_original, const CompressedDegreeSequence& a_compressed,
                                      const DegreeSequence& b);

}  // namespace pce

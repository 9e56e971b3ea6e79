#include "pce/degree_sequence.hpp"

#include <algorithm>
#include <cmath>

#include "pce/error.hpp"
#include "pce/format.hpp"

namespace pce {

NormOrder::NormOrder(double p) : p_(p) {
  if (!(p > 0)) throw InputError("norm order must be positive, got " + exact_decimal(p));
}

NormOrder NormOrder::parse(const std::string& text) { return NormOrder(parse_decimal(text)); }

std::string to_string(NormOrder p) { return exact_decimal(p.value()); }

std::int64_t CompressedDegreeSequence::length() const {
  std::int64_t n = 0;
  for (const auto& r : runs) n += r.length;
  return n;
}

double CompressedDegreeSequence::total() const {
  double t = 0;
  for (const auto& r : runs) t += r.value * static_cast<double>(r.length);
  return t;
}

bool CompressedDegreeSequence::non_increasing() const {
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (runs[i].value > runs[i - 1].value) return false;
  return true;
}

std::vector<double> CompressedDegreeSequence::expand() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(length()));
  for (const auto& r : runs) out.insert(out.end(), static_cast<std::size_t>(r.length), r.value);
  return out;
}

std::vector<double> CompressedDegreeSequence::cdf() const {
  std::vector<double> out = expand();
  for (std::size_t i = 1; i < out.size(); ++i) out[i] += out[i - 1];
  return out;
}

namespace {

template <typename RunRange, typename Get>
double log_norm_of_runs(const RunRange& runs, NormOrder p, Get get) {
  double top = 0;
  for (const auto& r : runs) top = std::max(top, get(r).first);
  if (top <= 0) return -INFINITY;
  if (p.is_infinite()) return std::log(top);
  double sum = 0;
  for (const auto& r : runs) {
    auto [v, count] = get(r);
    if (v > 0) sum += count * std::pow(v / top, p.value());
  }
  return std::log(top) + std::log(sum) / p.value();
}

std::vector<Run> runs_of(const std::vector<std::int64_t>& degrees) {
  std::vector<Run> runs;
  for (auto d : degrees) {
    if (!runs.empty() && runs.back().value == static_cast<double>(d))
      ++runs.back().length;
    else
      runs.push_back({static_cast<double>(d), 1});
  }
  return runs;
}

}  // namespace

double log_lp_norm(const CompressedDegreeSequence& ds, NormOrder p) {
  return log_norm_of_runs(ds.runs, p, [](const Run& r) {
    return std::pair<double, double>(r.value, static_cast<double>(r.length));
  });
}

double log_lp_norm(const DegreeSequence& ds, NormOrder p) {
  return log_lp_norm(CompressedDegreeSequence{runs_of(ds.degrees), true}, p);
}

double lp_norm(const CompressedDegreeSequence& ds, NormOrder p) {
  // The integer cases stay exact instead of round-tripping through log.
  if (p.is_infinite()) {
    double top = 0;
    for (const auto& r : ds.runs) top = std::max(top, r.value);
    return top;
  }
  if (p.value() == 1) return ds.total();
  return std::exp(log_lp_norm(ds, p));
}

double lp_norm(const DegreeSequence& ds, NormOrder p) { return lp_norm(run_length_compress(ds), p); }

CompressedDegreeSequence run_length_compress(const DegreeSequence& ds) {
  return CompressedDegreeSequence{runs_of(ds.degrees), true};
}

bool cdf_dominates(const CompressedDegreeSequence& compressed, const std::vector<double>& original) {
  double ours = 0, theirs = 0;
  std::size_t i = 0;
  auto ok = [&] { return ours >= theirs - 1e-9 * std::max(1.0, std::abs(theirs)); };
  for (const auto& r : compressed.runs) {
    for (std::int64_t k = 0; k < r.length && i < original.size(); ++k, ++i) {
      ours += r.value;
      theirs += original[i];
      if (!ok()) return false;
    }
  }
  for (; i < original.size(); ++i) {
    theirs += original[i];
    if (!ok()) return false;
  }
  return true;
}

namespace {

struct Segment {
  std::size_t start;  // first index covered
  std::size_t end;    // one past the last index
  double value;
  double cdf_end;  // compressed CDF at end - 1
};

// Smallest constant c >= 0 with offset + c*k >= cdf[start + k - 1] for every k
// in the segment, accumulated the same way CompressedDegreeSequence::cdf does.
double min_dominating_value(const std::vector<double>& cdf, std::size_t start, std::size_t end,
                            double offset) {
  double c = 0;
  for (std::size_t i = start; i < end; ++i)
    c = std::max(c, (cdf[i] - offset) / static_cast<double>(i - start + 1));
  // Rounding in the accumulation can leave it a few ulps short; the step is
  // sized by the offset, since a tiny c can vanish entirely when added to it.
  double step = std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(offset) + c);
  for (;;) {
    double acc = offset;
    bool ok = true;
    for (std::size_t i = start; i < end && ok; ++i) {
      acc += c;
      ok = acc >= cdf[i];
    }
    if (ok) return c;
    c += step;
    step *= 2;
  }
}

}  // namespace

CompressedDegreeSequence cdf_upper_compress(const DegreeSequence& ds, int max_runs) {
  if (max_runs < 1) throw InputError("max_runs must be at least 1");
  auto lossless = run_length_compress(ds);
  if (static_cast<int>(lossless.runs.size()) <= max_runs) return lossless;

  const std::size_t n = ds.degrees.size();
  std::vector<double> original(ds.degrees.begin(), ds.degrees.end());
  std::vector<double> cdf(original);
  for (std::size_t i = 1; i < n; ++i) cdf[i] += cdf[i - 1];

  // The first run is d1 alone when we can afford it, so the maximum survives.
  std::vector<Segment> stack;
  std::size_t rest = 0;
  if (max_runs >= 2) {
    stack.push_back({0, 1, original[0], original[0]});
    rest = 1;
  }
  const std::size_t pieces = std::min<std::size_t>(max_runs - stack.size(), n - rest);
  const std::size_t span = n - rest;
  for (std::size_t k = 0; k < pieces; ++k) {
    std::size_t start = rest + span * k / pieces;
    std::size_t end = rest + span * (k + 1) / pieces;
    for (;;) {
      double offset = stack.empty() ? 0.0 : stack.back().cdf_end;
      double c = min_dominating_value(cdf, start, end, offset);
      bool fixed_head = stack.size() == 1 && max_runs >= 2;
      if (!stack.empty() && !fixed_head && c > stack.back().value) {
        start = stack.back().start;
        stack.pop_back();
        continue;
      }
      double acc = offset;
      for (std::size_t i = start; i < end; ++i) acc += c;
      stack.push_back({start, end, c, acc});
      break;
    }
  }

  CompressedDegreeSequence out;
  for (const auto& s : stack) {
    auto len = static_cast<std::int64_t>(s.end - s.start);
    if (!out.runs.empty() && out.runs.back().value == s.value)
      out.runs.back().length += len;
    else
      out.runs.push_back({s.value, len});
  }
  out.cdf_certified = cdf_dominates(out, original);
  if (!out.cdf_certified) throw Error("cdf_upper_compress produced a non-dominating sequence");
  return out;
}

}  // namespace pce

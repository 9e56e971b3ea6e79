#pragma once

#include <string>

namespace pce {

/// Shortest decimal string that parses back to exactly `x`. "inf", "-inf" and
/// "nan" for non-finite values.
std::string exact_decimal(double x);

/// Inverse of exact_decimal. Throws ParseError on junk.
double parse_decimal(const std::string& text);

/// Fixed number of significant digits, for reports.
std::string significant(double x, int digits = 12);

}  // namespace pce

#include "pce/format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "pce/error.hpp"

namespace pce {

std::string exact_decimal(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

double parse_decimal(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF") return INFINITY;
  if (text == "-inf") return -INFINITY;
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
    throw ParseError("not a decimal number: '" + text + "'", 0);
  return v;
}

std::string significant(double x, int digits) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

}  // namespace pce

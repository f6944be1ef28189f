#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace bayeslab {

/// Decimal text with 12 significant digits; infinities render as `inf` / `-inf`.
inline std::string format_real(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

/// Rounds to the nearest double representable with 12 significant decimal digits.
inline double round_significant(double value) {
  if (!std::isfinite(value)) return value;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return std::strtod(buf, nullptr);
}

}  // namespace bayeslab

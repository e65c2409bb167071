#include "cori/number_format.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace cori {

namespace {

double pow10(int decimals) {
  double scale = 1.0;
  for (int i = 0; i < decimals; ++i) scale *= 10.0;
  return scale;
}

}  // namespace

double round_half_away(double value, int decimals) {
  const double scale = pow10(decimals);
  const double scaled = value * scale;
  return std::round(scaled + std::copysign(1e-9 * std::max(1.0, std::abs(scaled)), scaled)) / scale;
}

std::string format_fixed(double value, int decimals) {
  if (decimals < 0 || decimals > 9) throw std::invalid_argument("format_fixed: decimals out of range");
  if (!std::isfinite(value)) throw std::invalid_argument("format_fixed: non-finite value");
  const double scale = pow10(decimals);
  const double scaled = value * scale;
  const auto units = static_cast<std::int64_t>(
      std::round(scaled + std::copysign(1e-9 * std::max(1.0, std::abs(scaled)), scaled)));
  const auto whole_scale = static_cast<std::int64_t>(scale);
  const std::int64_t magnitude = units < 0 ? -units : units;
  const std::string sign = units < 0 ? "-" : "";
  if (decimals == 0) return sign + std::to_string(magnitude);
  return fmt::format("{}{}.{:0{}d}", sign, magnitude / whole_scale, magnitude % whole_scale, decimals);
}

}  // namespace cori

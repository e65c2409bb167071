#pragma once

#include <string>

namespace cori {

/// Round half away from zero at `decimals` places. A 1e-9 relative nudge
/// absorbs binary representation error so 0.15 rounds to 0.2.
double round_half_away(double value, int decimals);

/// Fixed-point text with half-away-from-zero rounding; never prints "-0.0".
std::string format_fixed(double value, int decimals);

inline std::string format_cm(double meters) { return format_fixed(meters * 100.0, 1); }
inline std::string format_newtons(double newtons) { return format_fixed(newtons, 2); }

}  // namespace cori

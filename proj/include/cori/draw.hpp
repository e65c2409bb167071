#pragma once

#include <cstdint>
#include <vector>

#include "cori/image.hpp"

namespace cori::draw {

/// Optional per-pixel record of which pixels a primitive touched
/// (width * height entries, row-major, nonzero = touched).
using Mask = std::vector<std::uint8_t>;

// Integer-center primitives. A pixel (x, y) is covered by a disk when
// (x - cx)^2 + (y - cy)^2 <= r^2 and by a line when its distance to the
// segment is <= thickness / 2.

void fill_disk(RgbImage& image, int cx, int cy, int radius, Rgb color, Mask* mask = nullptr);

/// Square of side `side` covering [cx - side/2, cx - side/2 + side).
void fill_square(RgbImage& image, int cx, int cy, int side, Rgb color, Mask* mask = nullptr);

void line(RgbImage& image, double x0, double y0, double x1, double y1, double thickness, Rgb color,
          Mask* mask = nullptr);

}  // namespace cori::draw

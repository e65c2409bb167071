#include "cori/draw.hpp"

#include <algorithm>
#include <cmath>

namespace cori::draw {

namespace {

void plot(RgbImage& image, int x, int y, Rgb color, Mask* mask) {
  if (!image.in_bounds(x, y)) return;
  image.set(x, y, color);
  if (mask != nullptr) (*mask)[static_cast<std::size_t>(y) * static_cast<std::size_t>(image.width()) + static_cast<std::size_t>(x)] = 1;
}

}  // namespace

void fill_disk(RgbImage& image, int cx, int cy, int radius, Rgb color, Mask* mask) {
  const long r2 = static_cast<long>(radius) * radius;
  for (int y = cy - radius; y <= cy + radius; ++y) {
    for (int x = cx - radius; x <= cx + radius; ++x) {
      const long dx = x - cx;
      const long dy = y - cy;
      if (dx * dx + dy * dy <= r2) plot(image, x, y, color, mask);
    }
  }
}

void fill_square(RgbImage& image, int cx, int cy, int side, Rgb color, Mask* mask) {
  const int x0 = cx - side / 2;
  const int y0 = cy - side / 2;
  for (int y = y0; y < y0 + side; ++y) {
    for (int x = x0; x < x0 + side; ++x) plot(image, x, y, color, mask);
  }
}

void line(RgbImage& image, double x0, double y0, double x1, double y1, double thickness, Rgb color, Mask* mask) {
  const double half = thickness / 2.0;
  const int min_x = static_cast<int>(std::floor(std::min(x0, x1) - half));
  const int max_x = static_cast<int>(std::ceil(std::max(x0, x1) + half));
  const int min_y = static_cast<int>(std::floor(std::min(y0, y1) - half));
  const int max_y = static_cast<int>(std::ceil(std::max(y0, y1) + half));
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  const double len2 = dx * dx + dy * dy;
  for (int y = std::max(min_y, 0); y <= std::min(max_y, image.height() - 1); ++y) {
    for (int x = std::max(min_x, 0); x <= std::min(max_x, image.width() - 1); ++x) {
      double t = len2 > 0.0 ? ((x - x0) * dx + (y - y0) * dy) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double px = x0 + t * dx - x;
      const double py = y0 + t * dy - y;
      if (px * px + py * py <= half * half) plot(image, x, y, color, mask);
    }
  }
}

}  // namespace cori::draw

#include "cori/annotation.hpp"

#include <algorithm>
#include <cmath>

#include "cori/draw.hpp"
#include "cori/errors.hpp"

namespace cori {

PixelRect compute_face_region(const BodyLandmarkSet& landmarks, int image_width, int image_height,
                              double margin_fraction, int min_box_px) {
  const auto facial = landmarks.facial();
  if (facial.empty()) throw DeidentificationError("cannot de-identify: no facial landmarks");

  double min_x = facial.front()->pixel.x();
  double max_x = min_x;
  double min_y = facial.front()->pixel.y();
  double max_y = min_y;
  for (const auto* l : facial) {
    min_x = std::min(min_x, l->pixel.x());
    max_x = std::max(max_x, l->pixel.x());
    min_y = std::min(min_y, l->pixel.y());
    max_y = std::max(max_y, l->pixel.y());
  }
  const double w = max_x - min_x;
  const double h = max_y - min_y;
  min_x -= margin_fraction * w;
  max_x += margin_fraction * w;
  min_y -= margin_fraction * h;
  max_y += margin_fraction * h;

  auto inflate = [min_box_px](double& lo, double& hi) {
    if (hi - lo < min_box_px) {
      const double c = 0.5 * (lo + hi);
      lo = c - 0.5 * min_box_px;
      hi = c + 0.5 * min_box_px;
    }
  };
  inflate(min_x, max_x);
  inflate(min_y, max_y);

  PixelRect r{static_cast<int>(std::floor(min_x)), static_cast<int>(std::floor(min_y)),
              static_cast<int>(std::ceil(max_x)), static_cast<int>(std::ceil(max_y))};
  r.x0 = std::clamp(r.x0, 0, image_width);
  r.x1 = std::clamp(r.x1, 0, image_width);
  r.y0 = std::clamp(r.y0, 0, image_height);
  r.y1 = std::clamp(r.y1, 0, image_height);
  return r;
}

Rgb side_color(Side side, const AnnotationStyle& style) {
  switch (side) {
    case Side::kLeft:
      return style.left_color;
    case Side::kRight:
      return style.right_color;
    case Side::kCenter:
      return style.center_color;
  }
  return style.center_color;
}

void pixelate(RgbImage& image, const PixelRect& region, int block_px) {
  for (int by = region.y0; by < region.y1; by += block_px) {
    for (int bx = region.x0; bx < region.x1; bx += block_px) {
      const int ex = std::min(bx + block_px, region.x1);
      const int ey = std::min(by + block_px, region.y1);
      unsigned long sum[3] = {0, 0, 0};
      unsigned long count = 0;
      for (int y = by; y < ey; ++y) {
        for (int x = bx; x < ex; ++x) {
          const Rgb c = image.at(x, y);
          sum[0] += c.r;
          sum[1] += c.g;
          sum[2] += c.b;
          ++count;
        }
      }
      if (count == 0) continue;
      const Rgb avg{static_cast<std::uint8_t>((sum[0] + count / 2) / count),
                    static_cast<std::uint8_t>((sum[1] + count / 2) / count),
                    static_cast<std::uint8_t>((sum[2] + count / 2) / count)};
      for (int y = by; y < ey; ++y) {
        for (int x = bx; x < ex; ++x) image.set(x, y, avg);
      }
    }
  }
}

AnnotatedScene annotate_person(const SceneBundle& scene, const AnnotationStyle& style) {
  AnnotatedScene out;
  const auto& env = scene.environment_image;
  out.face_region =
      compute_face_region(scene.landmarks, env.width(), env.height(), style.margin_fraction, style.min_face_box_px);
  out.annotated_image = env;
  pixelate(out.annotated_image, out.face_region, style.pixelation_block_px);

  auto draw_one = [&](const BodyLandmark& l) {
    const int x = static_cast<int>(std::lround(l.pixel.x()));
    const int y = static_cast<int>(std::lround(l.pixel.y()));
    const Rgb color = side_color(l.side, style);
    draw::fill_disk(out.annotated_image, x, y, style.landmark_radius_px, style.outline_color);
    draw::fill_disk(out.annotated_image, x, y, style.landmark_radius_px - style.landmark_outline_px, color);
    out.draw_log.push_back({l.name, x, y, color, l.facial});
  };
  // Body first, then facial landmarks on top of the pixelated face.
  for (const auto& l : scene.landmarks.entries) {
    if (l.visible && !l.facial) draw_one(l);
  }
  for (const auto& l : scene.landmarks.entries) {
    if (l.visible && l.facial) draw_one(l);
  }
  return out;
}

}  // namespace cori

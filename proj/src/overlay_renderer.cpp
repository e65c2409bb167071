#include "cori/overlay_renderer.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "cori/errors.hpp"

namespace cori {

namespace {

std::uint8_t channel(double v) { return static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255)); }

constexpr Rgb kCyan{0, 255, 255};

}  // namespace

std::vector<Eigen::Vector2d> project_points(const CameraModel& camera, std::span<const Eigen::Vector3d> positions_m,
                                            int first_index) {
  const Eigen::Matrix3d rotation = camera.rotation();
  const Eigen::Vector3d translation = camera.extrinsics_base_to_camera.topRightCorner<3, 1>();
  std::vector<Eigen::Vector2d> out;
  out.reserve(positions_m.size());
  for (std::size_t i = 0; i < positions_m.size(); ++i) {
    const Eigen::Vector3d pc = rotation * positions_m[i] + translation;
    if (!(pc.z() > 0.0)) throw ProjectionError(first_index + static_cast<int>(i), pc.z());
    out.emplace_back(camera.fx() * pc.x() / pc.z() + camera.cx(), camera.fy() * pc.y() / pc.z() + camera.cy());
  }
  return out;
}

Rgb velocity_color(double speed_mps, double segment_min, double segment_max) {
  const double span = segment_max - segment_min;
  const double frac = span > 0.0 ? std::clamp((speed_mps - segment_min) / span, 0.0, 1.0) : 0.5;
  return {0, channel(100.0 + 155.0 * frac), 0};
}

Rgb force_color(double force_n, double segment_min, double segment_max) {
  if (force_n <= kForceEpsilon) return kCyan;
  const double span = segment_max - segment_min;
  const double frac = span > 0.0 ? std::clamp((force_n - segment_min) / span, 0.0, 1.0) : 0.5;
  return {channel(255.0 * frac), channel(255.0 * (1.0 - frac)), 255};
}

RgbImage whiten(const RgbImage& image, double whitening) {
  RgbImage out = image;
  for (auto& b : out.bytes()) b = channel(whitening * 255.0 + (1.0 - whitening) * b);
  return out;
}

namespace {

PixelRect crop_rect_for(std::span<const Eigen::Vector2d> points, int width, int height, const RenderStyle& style) {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (const auto& p : points) {
    min_x = std::min(min_x, p.x());
    min_y = std::min(min_y, p.y());
    max_x = std::max(max_x, p.x());
    max_y = std::max(max_y, p.y());
  }
  const double pad = std::max(style.crop_pad_fraction * std::hypot(max_x - min_x, max_y - min_y),
                              static_cast<double>(style.crop_pad_min_px));
  PixelRect r{static_cast<int>(std::floor(min_x - pad)), static_cast<int>(std::floor(min_y - pad)),
              static_cast<int>(std::ceil(max_x + pad)) + 1, static_cast<int>(std::ceil(max_y + pad)) + 1};
  r.x0 = std::clamp(r.x0, 0, width);
  r.x1 = std::clamp(r.x1, 0, width);
  r.y0 = std::clamp(r.y0, 0, height);
  r.y1 = std::clamp(r.y1, 0, height);
  if (r.empty()) r = {0, 0, width, height};
  return r;
}

void draw_axes(RgbImage& image, const CameraModel& camera, const RenderStyle& style,
               std::vector<DrawRecord>& log, draw::Mask& mask) {
  static constexpr std::array<Rgb, 3> kAxisColors{Rgb{255, 0, 0}, Rgb{0, 255, 0}, Rgb{0, 0, 255}};
  const Eigen::Matrix3d rotation = camera.rotation();
  std::array<int, 3> order{0, 1, 2};
  // Axes pointing away from the camera are drawn first so nearer ones overlap them.
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rotation(2, a) > rotation(2, b); });
  const Eigen::Vector2d origin(style.axes_origin_px, style.axes_origin_px);
  for (int axis : order) {
    const Eigen::Vector2d dir(rotation(0, axis), rotation(1, axis));
    const Eigen::Vector2d tip = origin + style.axes_arm_px * dir;
    draw::line(image, origin.x(), origin.y(), tip.x(), tip.y(), style.axes_thickness_px, kAxisColors[axis], &mask);
    log.push_back({Primitive::kAxis, 0, origin, tip, kAxisColors[axis]});
  }
}

}  // namespace

std::vector<RenderedSegmentView> render_segment_views(const AnnotatedScene& annotated, const Trajectory& trajectory,
                                                      const SegmentationResult& segmentation,
                                                      const CameraModel& camera, const RenderStyle& style) {
  std::vector<Eigen::Vector3d> positions;
  positions.reserve(trajectory.waypoints.size());
  for (const auto& w : trajectory.waypoints) positions.push_back(w.position_m);
  const auto pixels = project_points(camera, positions, 1);

  const RgbImage background = whiten(annotated.annotated_image, style.whitening);
  const int width = background.width();
  const int height = background.height();

  std::vector<RenderedSegmentView> views;
  views.reserve(segmentation.ranges.size());
  for (std::size_t k = 0; k < segmentation.ranges.size(); ++k) {
    const IndexRange range = segmentation.ranges[k];
    RenderedSegmentView view;
    view.segment_index = static_cast<int>(k) + 1;
    view.range = range;
    view.full_image = background;
    view.overlay_mask.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
    for (int i = range.first; i <= range.last; ++i) view.projected_points.push_back(pixels[static_cast<std::size_t>(i - 1)]);

    auto px = [&](int i) -> const Eigen::Vector2d& { return pixels[static_cast<std::size_t>(i - 1)]; };
    auto rounded = [](const Eigen::Vector2d& p) {
      return std::pair<int, int>{static_cast<int>(std::lround(p.x())), static_cast<int>(std::lround(p.y()))};
    };

    draw_axes(view.full_image, camera, style, view.draw_log, view.overlay_mask);

    double f_min = std::numeric_limits<double>::infinity();
    double f_max = -f_min;
    for (int j = range.first; j < range.last; ++j) {
      if (!trajectory.interval_forceful(j)) continue;
      const double f = trajectory.interval_force(j);
      f_min = std::min(f_min, f);
      f_max = std::max(f_max, f);
    }
    for (int j = range.first; j < range.last; ++j) {
      const Rgb color = trajectory.interval_forceful(j) ? force_color(trajectory.interval_force(j), f_min, f_max) : kCyan;
      draw::line(view.full_image, px(j).x(), px(j).y(), px(j + 1).x(), px(j + 1).y(), style.line_thickness_px, color,
                 &view.overlay_mask);
      view.draw_log.push_back({Primitive::kLine, j, px(j), px(j + 1), color});
    }

    double v_min = std::numeric_limits<double>::infinity();
    double v_max = -v_min;
    for (int i = range.first; i <= range.last; ++i) {
      v_min = std::min(v_min, trajectory.at(i).speed_mps);
      v_max = std::max(v_max, trajectory.at(i).speed_mps);
    }
    for (int i = range.first + 1; i < range.last; ++i) {
      const Rgb color = velocity_color(trajectory.at(i).speed_mps, v_min, v_max);
      const auto [x, y] = rounded(px(i));
      draw::fill_disk(view.full_image, x, y, style.waypoint_radius_px, color, &view.overlay_mask);
      view.draw_log.push_back({Primitive::kCircle, i, px(i), px(i), color});
    }

    for (const auto& [index, color] : {std::pair{range.first, style.start_color}, std::pair{range.last, style.end_color}}) {
      const auto [x, y] = rounded(px(index));
      draw::fill_square(view.full_image, x, y, style.marker_side_px, color, &view.overlay_mask);
      view.draw_log.push_back({Primitive::kSquare, index, px(index), px(index), color});
    }

    view.crop_rect = crop_rect_for(view.projected_points, width, height, style);
    view.crop_image = view.full_image.crop(view.crop_rect);
    views.push_back(std::move(view));
  }
  return views;
}

nlohmann::json render_manifest(std::span<const RenderedSegmentView> views) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& v : views) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : v.projected_points) points.push_back({p.x(), p.y()});
    list.push_back({{"k", v.segment_index},
                    {"range", {v.range.first, v.range.last}},
                    {"crop_rect", {v.crop_rect.x0, v.crop_rect.y0, v.crop_rect.x1, v.crop_rect.y1}},
                    {"projected_points", points},
                    {"full", fmt::format("seg{}_full.png", v.segment_index)},
                    {"crop", fmt::format("seg{}_crop.png", v.segment_index)}});
  }
  return {{"views", list}};
}

}  // namespace cori

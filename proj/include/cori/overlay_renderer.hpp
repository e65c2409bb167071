#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cori/annotation.hpp"
#include "cori/core_model.hpp"
#include "cori/draw.hpp"
#include "cori/image.hpp"
#include "cori/segmentation.hpp"
#include "json.hpp"

namespace cori {

/// Pinhole projection of base-frame points: extrinsics, then intrinsics.
/// Sub-pixel coordinates are kept. Throws ProjectionError naming
/// first_index + i for the first point with non-positive camera depth.
std::vector<Eigen::Vector2d> project_points(const CameraModel& camera, std::span<const Eigen::Vector3d> positions_m,
                                            int first_index = 1);

struct RenderStyle {
  double whitening = 0.5;
  int marker_side_px = 14;
  int waypoint_radius_px = 6;
  double line_thickness_px = 4.0;
  int axes_arm_px = 40;
  int axes_origin_px = 56;  // glyph origin, from the top-left corner
  double axes_thickness_px = 3.0;
  double crop_pad_fraction = 0.2;
  int crop_pad_min_px = 40;
  Rgb start_color{0, 0, 255};
  Rgb end_color{255, 0, 0};
};

/// Dark green at segment_min to bright green at segment_max; the midpoint
/// shade when the range is degenerate.
Rgb velocity_color(double speed_mps, double segment_min, double segment_max);

/// Cyan for a force-free interval; otherwise cyan -> magenta across the
/// segment's forceful range; the midpoint blend when that range is
/// degenerate.
Rgb force_color(double force_n, double segment_min, double segment_max);

enum class Primitive { kLine, kCircle, kSquare, kAxis };

struct DrawRecord {
  Primitive primitive;
  int waypoint_index = 0;  // first waypoint of a line; the waypoint for markers; 0 for axes
  Eigen::Vector2d from = Eigen::Vector2d::Zero();
  Eigen::Vector2d to = Eigen::Vector2d::Zero();  // equal to `from` for markers
  Rgb color;
};

struct RenderedSegmentView {
  int segment_index = 0;  // 1-based
  IndexRange range;
  RgbImage full_image;
  RgbImage crop_image;
  PixelRect crop_rect;
  std::vector<Eigen::Vector2d> projected_points;  // one per waypoint in range
  std::vector<DrawRecord> draw_log;               // in drawing order
  draw::Mask overlay_mask;                        // pixels touched by any overlay element
};

/// Per-channel round(w * 255 + (1 - w) * c).
RgbImage whiten(const RgbImage& image, double whitening = 0.5);

std::vector<RenderedSegmentView> render_segment_views(const AnnotatedScene& annotated, const Trajectory& trajectory,
                                                      const SegmentationResult& segmentation,
                                                      const CameraModel& camera, const RenderStyle& style = {});

/// {"views": [{"k", "range": [s, e], "crop_rect": [x0, y0, x1, y1],
///             "projected_points": [[u, v], ...], "full": file, "crop": file}]}
nlohmann::json render_manifest(std::span<const RenderedSegmentView> views);

}  // namespace cori

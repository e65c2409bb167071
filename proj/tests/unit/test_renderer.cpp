#include <fmt/format.h>
#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "cori/errors.hpp"
#include "cori/overlay_renderer.hpp"
#include "oracles/oracles.hpp"
#include "oracles/random_inputs.hpp"
#include "support.hpp"

namespace cori {
namespace {

CameraModel simple_camera() {
  CameraModel c;
  c.intrinsics << 500, 0, 320, 0, 500, 240, 0, 0, 1;
  c.image_width = 640;
  c.image_height = 480;
  return c;
}

struct Bathing {
  SceneBundle scene;
  Trajectory trajectory;
  AnnotatedScene annotated;
  SegmentationResult segmentation;
  std::vector<RenderedSegmentView> views;
};

const Bathing& bathing() {
  static const Bathing b = [] {
    Bathing out;
    std::tie(out.scene, out.trajectory) = testing::load_bathing();
    out.annotated = annotate_person(out.scene);
    out.segmentation = segment_trajectory(out.trajectory);
    out.views = render_segment_views(out.annotated, out.trajectory, out.segmentation, out.scene.camera);
    return out;
  }();
  return b;
}

TEST(Projection, IdentityExtrinsics) {
  const auto c = simple_camera();
  const std::vector<Eigen::Vector3d> pts{{0, 0, 1}, {0.1, -0.2, 2}};
  const auto px = project_points(c, pts);
  EXPECT_NEAR(px[0].x(), 320.0, 1e-12);
  EXPECT_NEAR(px[0].y(), 240.0, 1e-12);
  EXPECT_NEAR(px[1].x(), 345.0, 1e-12);
  EXPECT_NEAR(px[1].y(), 190.0, 1e-12);
}

TEST(Projection, NonPositiveDepthNamesWaypoint) {
  const auto c = simple_camera();
  const std::vector<Eigen::Vector3d> pts{{0, 0, 1}, {0, 0, 0}, {0, 0, -1}};
  try {
    project_points(c, pts, 10);
    FAIL();
  } catch (const ProjectionError& e) {
    EXPECT_EQ(e.waypoint_index(), 11);
  }
}

TEST(Projection, MatchesPlainArrayOracle) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const auto cp = testing::random_camera_point(rng);
    const std::vector<Eigen::Vector3d> pts{cp.point};
    const auto got = project_points(cp.camera, pts);
    const auto want = oracle::project(cp.camera, cp.point);
    ASSERT_TRUE(want.has_value());
    EXPECT_NEAR(got[0].x(), (*want)[0], 1e-9);
    EXPECT_NEAR(got[0].y(), (*want)[1], 1e-9);
  }
}

TEST(Colors, VelocityEndpointsAndMonotone) {
  EXPECT_EQ(velocity_color(0.0, 0.0, 1.0), (Rgb{0, 100, 0}));
  EXPECT_EQ(velocity_color(1.0, 0.0, 1.0), (Rgb{0, 255, 0}));
  EXPECT_EQ(velocity_color(0.3, 0.3, 0.3), (Rgb{0, 178, 0}));
  int last = -1;
  for (int i = 0; i <= 100; ++i) {
    const int g = velocity_color(i / 100.0, 0.0, 1.0).g;
    EXPECT_GE(g, last);
    last = g;
  }
}

TEST(Colors, ForceEndpointsAndMonotone) {
  EXPECT_EQ(force_color(0.0, 1.0, 2.0), (Rgb{0, 255, 255}));
  EXPECT_EQ(force_color(1.0, 1.0, 2.0), (Rgb{0, 255, 255}));
  EXPECT_EQ(force_color(2.0, 1.0, 2.0), (Rgb{255, 0, 255}));
  EXPECT_EQ(force_color(3.0, 3.0, 3.0), (Rgb{128, 128, 255}));
  int last_r = -1;
  for (int i = 0; i <= 100; ++i) {
    const Rgb c = force_color(1.0 + i / 100.0, 1.0, 2.0);
    EXPECT_GE(c.r, last_r);
    // Both channels round half up at the midpoint.
    EXPECT_GE(c.r + c.g, 255);
    EXPECT_LE(c.r + c.g, 256);
    last_r = c.r;
  }
}

TEST(Render, OneViewPerSegment) {
  const auto& b = bathing();
  ASSERT_EQ(b.views.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(b.views[k].segment_index, static_cast<int>(k) + 1);
    EXPECT_EQ(b.views[k].range, b.segmentation.ranges[k]);
    EXPECT_EQ(static_cast<int>(b.views[k].projected_points.size()), b.views[k].range.count());
  }
}

TEST(Render, BackgroundOutsideOverlayIsWhitened) {
  const auto& b = bathing();
  const RgbImage& src = b.annotated.annotated_image;
  for (const auto& v : b.views) {
    for (int y = 0; y < src.height(); ++y) {
      for (int x = 0; x < src.width(); ++x) {
        if (v.overlay_mask[static_cast<std::size_t>(y) * src.width() + x]) continue;
        const Rgb s = src.at(x, y);
        const Rgb o = v.full_image.at(x, y);
        auto w = [](int c) { return static_cast<int>(std::lround(0.5 * 255 + 0.5 * c)); };
        ASSERT_EQ(o.r, w(s.r));
        ASSERT_EQ(o.g, w(s.g));
        ASSERT_EQ(o.b, w(s.b));
      }
    }
  }
}

TEST(Render, MarkersAndCircles) {
  const auto& b = bathing();
  const RenderStyle style;
  for (const auto& v : b.views) {
    int circles = 0;
    int squares = 0;
    for (const auto& r : v.draw_log) {
      if (r.primitive == Primitive::kCircle) {
        ++circles;
        EXPECT_GT(r.waypoint_index, v.range.first);
        EXPECT_LT(r.waypoint_index, v.range.last);
      }
      if (r.primitive == Primitive::kSquare) ++squares;
    }
    EXPECT_EQ(circles, v.range.count() - 2);
    EXPECT_EQ(squares, 2);
    const auto& start = v.projected_points.front();
    const auto& end = v.projected_points.back();
    // Square centers survive unless the two markers overlap.
    if ((start - end).norm() > style.marker_side_px * 1.5) {
      EXPECT_EQ(v.full_image.at(static_cast<int>(std::lround(start.x())), static_cast<int>(std::lround(start.y()))),
                style.start_color);
    }
    EXPECT_EQ(v.full_image.at(static_cast<int>(std::lround(end.x())), static_cast<int>(std::lround(end.y()))),
              style.end_color);
    EXPECT_EQ(v.draw_log.back().primitive, Primitive::kSquare);
    EXPECT_EQ(v.draw_log.back().color, style.end_color);
  }
}

TEST(Render, ForceLinesSweepCyanToMagentaOnlyInForcefulSegment) {
  const auto& b = bathing();
  for (const auto& v : b.views) {
    std::vector<Rgb> lines;
    for (const auto& r : v.draw_log) {
      if (r.primitive == Primitive::kLine) lines.push_back(r.color);
    }
    ASSERT_EQ(static_cast<int>(lines.size()), v.range.count() - 1);
    if (v.segment_index != 2) {
      for (const auto& c : lines) EXPECT_EQ(c, (Rgb{0, 255, 255}));
      continue;
    }
    bool has_min = false;
    bool has_max = false;
    for (const auto& c : lines) {
      EXPECT_EQ(c.b, 255);
      EXPECT_GE(c.r + c.g, 255);
      EXPECT_LE(c.r + c.g, 256);
      has_min |= c == Rgb{0, 255, 255};
      has_max |= c == Rgb{255, 0, 255};
    }
    EXPECT_TRUE(has_min);
    EXPECT_TRUE(has_max);
  }
}

TEST(Render, AxesGlyphDrawnFirst) {
  const auto& b = bathing();
  for (const auto& v : b.views) {
    ASSERT_GE(v.draw_log.size(), 3u);
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(v.draw_log[static_cast<std::size_t>(i)].primitive, Primitive::kAxis);
      EXPECT_EQ(v.draw_log[static_cast<std::size_t>(i)].from, Eigen::Vector2d(56, 56));
      EXPECT_LE((v.draw_log[static_cast<std::size_t>(i)].to - Eigen::Vector2d(56, 56)).norm(), 40.0 + 1e-9);
    }
  }
}

TEST(Render, CropContainsAllPoints) {
  const auto& b = bathing();
  for (const auto& v : b.views) {
    EXPECT_EQ(v.crop_image.width(), v.crop_rect.width());
    EXPECT_EQ(v.crop_image.height(), v.crop_rect.height());
    for (const auto& p : v.projected_points) {
      EXPECT_TRUE(v.crop_rect.contains(static_cast<int>(std::floor(p.x())), static_cast<int>(std::floor(p.y()))));
    }
    EXPECT_EQ(v.crop_image, v.full_image.crop(v.crop_rect));
  }
}

TEST(Render, DeterministicBytes) {
  const auto& b = bathing();
  const auto again = render_segment_views(b.annotated, b.trajectory, b.segmentation, b.scene.camera);
  for (std::size_t k = 0; k < again.size(); ++k) {
    EXPECT_EQ(encode_png(again[k].full_image), encode_png(b.views[k].full_image));
    EXPECT_EQ(encode_png(again[k].crop_image), encode_png(b.views[k].crop_image));
  }
}

TEST(Render, MatchesGoldenImages) {
  const auto& b = bathing();
  for (const auto& v : b.views) {
    for (const auto& [name, image] : {std::pair{fmt::format("seg{}_full.png", v.segment_index), &v.full_image},
                                      std::pair{fmt::format("seg{}_crop.png", v.segment_index), &v.crop_image}}) {
      const auto path = testing::golden("bathing/" + name);
      if (testing::update_golden()) {
        std::filesystem::create_directories(path.parent_path());
        write_png(*image, path);
      }
      ASSERT_TRUE(std::filesystem::exists(path)) << path;
      EXPECT_TRUE(read_png(path) == *image) << name;
    }
  }
}

TEST(Render, ProjectionFailureSurfaces) {
  auto [scene, traj] = testing::load_bathing();
  // A point one meter behind the camera.
  const Eigen::Vector3d t = scene.camera.extrinsics_base_to_camera.topRightCorner<3, 1>();
  traj.waypoints[4].position_m = scene.camera.rotation().transpose() * (Eigen::Vector3d(0, 0, -1) - t);
  const auto annotated = annotate_person(scene);
  const auto seg = segment_trajectory(traj);
  try {
    render_segment_views(annotated, traj, seg, scene.camera);
    FAIL();
  } catch (const ProjectionError& e) {
    EXPECT_EQ(e.waypoint_index(), 5);
  }
}

TEST(Render, ManifestShape) {
  const auto& b = bathing();
  const auto m = render_manifest(b.views);
  ASSERT_EQ(m["views"].size(), 3u);
  EXPECT_EQ(m["views"][1]["range"], nlohmann::json({9, 39}));
  EXPECT_EQ(m["views"][1]["full"], "seg2_full.png");
  EXPECT_EQ(m["views"][1]["projected_points"].size(), 31u);
}

}  // namespace
}  // namespace cori

#pragma once

#include <string>
#include <vector>

#include "cori/core_model.hpp"
#include "cori/image.hpp"

namespace cori {

struct AnnotationStyle {
  double margin_fraction = 0.6;
  int min_face_box_px = 32;
  int pixelation_block_px = 16;
  int landmark_radius_px = 7;
  int landmark_outline_px = 2;
  Rgb left_color{170, 220, 255};
  Rgb right_color{255, 235, 60};
  Rgb center_color{255, 255, 255};
  Rgb outline_color{30, 30, 30};
};

struct LandmarkDraw {
  std::string name;
  int x = 0;
  int y = 0;
  Rgb color;
  bool facial = false;
};

/// The de-identified, landmark-annotated scene image.
struct AnnotatedScene {
  RgbImage annotated_image;
  PixelRect face_region;
  std::vector<LandmarkDraw> draw_log;
};

/// Bounding box of the facial landmark pixels, grown by margin_fraction of
/// its width (height) on each horizontal (vertical) side, inflated about its
/// center to at least min_box_px per axis, then clamped to the image.
/// Throws DeidentificationError when no facial landmark is present.
PixelRect compute_face_region(const BodyLandmarkSet& landmarks, int image_width, int image_height,
                              double margin_fraction = 0.6, int min_box_px = 32);

Rgb side_color(Side side, const AnnotationStyle& style = {});

/// Replaces every pixel of `region` with the rounded mean of its block;
/// blocks tile the region from its top-left corner.
void pixelate(RgbImage& image, const PixelRect& region, int block_px);

AnnotatedScene annotate_person(const SceneBundle& scene, const AnnotationStyle& style = {});

}  // namespace cori

#include "cori/core_model.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cori/errors.hpp"

namespace cori {

ProjectionError::ProjectionError(int waypoint_index, double depth)
    : std::runtime_error(fmt::format("waypoint {} projects with non-positive depth {:.6f} m", waypoint_index,
                                     depth)),
      waypoint_index_(waypoint_index) {}

const IntervalForceProfile* Trajectory::profile_for(int from_index) const {
  auto it = std::find_if(force_profiles.begin(), force_profiles.end(),
                         [&](const IntervalForceProfile& p) { return p.from_index == from_index; });
  return it == force_profiles.end() ? nullptr : &*it;
}

double Trajectory::interval_force(int from_index) const {
  if (!force_profiles.empty()) {
    const auto* profile = profile_for(from_index);
    if (profile == nullptr || profile->samples_n.empty()) return 0.0;
    const auto& s = profile->samples_n;
    return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  }
  return 0.5 * (at(from_index).force_n + at(from_index + 1).force_n);
}

bool Trajectory::interval_forceful(int from_index) const {
  if (!force_profiles.empty()) {
    const auto* profile = profile_for(from_index);
    if (profile == nullptr) return false;
    return std::any_of(profile->samples_n.begin(), profile->samples_n.end(),
                       [](double f) { return f > kForceEpsilon; });
  }
  return interval_force(from_index) > kForceEpsilon;
}

std::string_view to_string(Side side) {
  switch (side) {
    case Side::kLeft:
      return "left";
    case Side::kRight:
      return "right";
    case Side::kCenter:
      return "center";
  }
  return "center";
}

Side side_from_string(std::string_view text) {
  if (text == "left") return Side::kLeft;
  if (text == "right") return Side::kRight;
  if (text == "center") return Side::kCenter;
  throw ParseError(fmt::format("unknown landmark side '{}'", text));
}

std::vector<const BodyLandmark*> BodyLandmarkSet::facial() const {
  std::vector<const BodyLandmark*> out;
  for (const auto& e : entries) {
    if (e.facial) out.push_back(&e);
  }
  return out;
}

const BodyLandmark* BodyLandmarkSet::find(std::string_view name) const {
  auto it = std::find_if(entries.begin(), entries.end(), [&](const BodyLandmark& l) { return l.name == name; });
  return it == entries.end() ? nullptr : &*it;
}

namespace {

constexpr CanonicalLandmark kVocabulary[] = {
    {"nose", Side::kCenter, true},
    {"left eye inner", Side::kLeft, true},
    {"left eye", Side::kLeft, true},
    {"left eye outer", Side::kLeft, true},
    {"right eye inner", Side::kRight, true},
    {"right eye", Side::kRight, true},
    {"right eye outer", Side::kRight, true},
    {"left ear", Side::kLeft, false},
    {"right ear", Side::kRight, false},
    {"mouth left", Side::kLeft, true},
    {"mouth right", Side::kRight, true},
    {"left shoulder", Side::kLeft, false},
    {"right shoulder", Side::kRight, false},
    {"left elbow", Side::kLeft, false},
    {"right elbow", Side::kRight, false},
    {"left wrist", Side::kLeft, false},
    {"right wrist", Side::kRight, false},
    {"left pinky", Side::kLeft, false},
    {"right pinky", Side::kRight, false},
    {"left index", Side::kLeft, false},
    {"right index", Side::kRight, false},
    {"left thumb", Side::kLeft, false},
    {"right thumb", Side::kRight, false},
    {"left hip", Side::kLeft, false},
    {"right hip", Side::kRight, false},
    {"left knee", Side::kLeft, false},
    {"right knee", Side::kRight, false},
    {"left ankle", Side::kLeft, false},
    {"right ankle", Side::kRight, false},
    {"left heel", Side::kLeft, false},
    {"right heel", Side::kRight, false},
    {"left foot index", Side::kLeft, false},
    {"right foot index", Side::kRight, false},
};

bool finite(const Eigen::Vector3d& v) { return v.allFinite(); }

}  // namespace

std::span<const CanonicalLandmark> canonical_landmarks() { return kVocabulary; }

const CanonicalLandmark* find_canonical_landmark(std::string_view name) {
  for (const auto& c : kVocabulary) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ValidationReport validate_trajectory(const Trajectory& trajectory) {
  ValidationReport report;
  auto add = [&](std::string invariant, int index, std::string message) {
    report.push_back({std::move(invariant), index, std::move(message)});
  };

  const int n = trajectory.size();
  if (n < 2) add("length", n, fmt::format("trajectory needs at least 2 waypoints, got {}", n));

  for (int i = 0; i < n; ++i) {
    const auto& w = trajectory.waypoints[static_cast<std::size_t>(i)];
    const int expected = i + 1;
    if (w.index != expected) {
      add("contiguous_indices", expected,
          fmt::format("waypoint indices not contiguous: expected {} but found {}", expected, w.index));
    }
    if (!std::isfinite(w.timestamp_s) || !finite(w.position_m) || !std::isfinite(w.speed_mps) ||
        !std::isfinite(w.force_n)) {
      add("finite", expected, fmt::format("non-finite value at index {}", expected));
    }
    if (i > 0 && !(w.timestamp_s > trajectory.waypoints[static_cast<std::size_t>(i - 1)].timestamp_s)) {
      add("increasing_timestamps", expected, fmt::format("timestamps not strictly increasing at index {}", expected));
    }
    if (w.speed_mps < 0.0) add("nonnegative_speed", expected, fmt::format("negative speed at index {}", expected));
    if (w.force_n < 0.0) add("nonnegative_force", expected, fmt::format("negative force at index {}", expected));
  }

  std::set<int> seen;
  for (const auto& p : trajectory.force_profiles) {
    if (p.from_index < 1 || p.from_index > n - 1) {
      add("profile_interval", p.from_index,
          fmt::format("force profile interval {} outside [1, {}]", p.from_index, n - 1));
    }
    if (!seen.insert(p.from_index).second) {
      add("unique_profile", p.from_index, fmt::format("duplicate force profile for interval {}", p.from_index));
    }
    if (p.samples_n.empty()) {
      add("profile_nonempty", p.from_index, fmt::format("empty force profile for interval {}", p.from_index));
    }
    for (std::size_t k = 0; k < p.samples_n.size(); ++k) {
      const double f = p.samples_n[k];
      if (!std::isfinite(f) || f < 0.0) {
        add("nonnegative_profile_sample", p.from_index,
            fmt::format("invalid force sample {} in profile for interval {} at position {}", f, p.from_index, k + 1));
      }
    }
  }
  return report;
}

ValidationReport validate_camera(const CameraModel& camera) {
  ValidationReport report;
  const auto& k = camera.intrinsics;
  if (!(camera.fx() > 0.0) || !(camera.fy() > 0.0)) {
    report.push_back({"positive_focal", 0, "camera focal lengths must be positive"});
  }
  if (k(0, 1) != 0.0 || k(1, 0) != 0.0 || k(2, 0) != 0.0 || k(2, 1) != 0.0 || k(2, 2) != 1.0) {
    report.push_back({"intrinsics_shape", 0, "intrinsics must be [[fx,0,cx],[0,fy,cy],[0,0,1]]"});
  }
  const Eigen::Matrix3d r = camera.rotation();
  if (!r.allFinite() || (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6 ||
      std::abs(r.determinant() - 1.0) > 1e-6) {
    report.push_back({"orthonormal_rotation", 0, "extrinsics rotation block is not orthonormal within 1e-6"});
  }
  const auto& e = camera.extrinsics_base_to_camera;
  if (e(3, 0) != 0.0 || e(3, 1) != 0.0 || e(3, 2) != 0.0 || e(3, 3) != 1.0) {
    report.push_back({"rigid_transform", 0, "extrinsics bottom row must be [0,0,0,1]"});
  }
  if (camera.image_width <= 0 || camera.image_height <= 0) {
    report.push_back({"image_size", 0, "camera image size must be positive"});
  }
  return report;
}

ValidationReport validate_landmarks(const BodyLandmarkSet& landmarks, int image_width, int image_height) {
  ValidationReport report;
  std::set<std::string> names;
  int position = 0;
  for (const auto& l : landmarks.entries) {
    ++position;
    const auto* canon = find_canonical_landmark(l.name);
    if (canon == nullptr) {
      report.push_back({"canonical_name", position, fmt::format("unknown landmark name '{}'", l.name)});
      continue;
    }
    if (!names.insert(l.name).second) {
      report.push_back({"unique_name", position, fmt::format("duplicate landmark '{}'", l.name)});
    }
    if (canon->side != l.side) {
      report.push_back({"side_consistent", position,
                        fmt::format("landmark '{}' has side '{}' but its name implies '{}'", l.name,
                                    to_string(l.side), to_string(canon->side))});
    }
    if (l.facial && !canon->facial) {
      report.push_back({"facial_vocabulary", position, fmt::format("landmark '{}' is not a facial landmark", l.name)});
    }
    if (!l.position_m.allFinite() || !l.pixel.allFinite()) {
      report.push_back({"finite", position, fmt::format("non-finite coordinates for '{}'", l.name)});
    } else if (l.visible && (l.pixel.x() < 0.0 || l.pixel.y() < 0.0 || l.pixel.x() >= image_width ||
                             l.pixel.y() >= image_height)) {
      report.push_back({"pixel_in_bounds", position,
                        fmt::format("visible landmark '{}' at ({}, {}) is outside the {}x{} image", l.name,
                                    l.pixel.x(), l.pixel.y(), image_width, image_height)});
    }
  }
  return report;
}

ValidationReport validate_scene(const SceneBundle& scene) {
  ValidationReport report;
  if (scene.environment_image.empty()) report.push_back({"environment_image", 0, "environment image is empty"});
  auto camera = validate_camera(scene.camera);
  report.insert(report.end(), camera.begin(), camera.end());
  if (!scene.environment_image.empty() && (scene.environment_image.width() != scene.camera.image_width ||
                                           scene.environment_image.height() != scene.camera.image_height)) {
    report.push_back({"image_size_match", 0,
                      fmt::format("environment image is {}x{} but camera expects {}x{}",
                                  scene.environment_image.width(), scene.environment_image.height(),
                                  scene.camera.image_width, scene.camera.image_height)});
  }
  auto lm = validate_landmarks(scene.landmarks, scene.camera.image_width, scene.camera.image_height);
  report.insert(report.end(), lm.begin(), lm.end());
  return report;
}

void throw_if_invalid(const ValidationReport& report, std::string_view what) {
  if (report.empty()) return;
  std::string msg = fmt::format("invalid {}: ", what);
  for (std::size_t i = 0; i < report.size(); ++i) {
    if (i > 0) msg += "; ";
    msg += report[i].message;
  }
  throw ValidationError(msg);
}

}  // namespace cori

#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cori/image.hpp"

namespace cori {

/// Below this a force value counts as zero (numerical noise).
inline constexpr double kForceEpsilon = 1e-6;

struct Waypoint {
  int index = 0;  // 1-based
  double timestamp_s = 0.0;
  Eigen::Vector3d position_m = Eigen::Vector3d::Zero();  // robot base frame
  bool gripper_closed = false;
  double speed_mps = 0.0;
  double force_n = 0.0;  // setpoint at the waypoint

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

/// Force samples over the interval from_index -> from_index + 1. The first
/// and last samples are the values at the interval endpoints.
struct IntervalForceProfile {
  int from_index = 0;
  std::vector<double> samples_n;

  friend bool operator==(const IntervalForceProfile&, const IntervalForceProfile&) = default;
};

/// Closed, 1-based waypoint index range [first, last].
struct IndexRange {
  int first = 0;
  int last = 0;

  int count() const { return last - first + 1; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct Trajectory {
  std::vector<Waypoint> waypoints;
  std::vector<IntervalForceProfile> force_profiles;

  int size() const { return static_cast<int>(waypoints.size()); }
  const Waypoint& at(int index) const { return waypoints.at(static_cast<std::size_t>(index - 1)); }

  /// Profile for the interval starting at `from_index`, if one was supplied.
  const IntervalForceProfile* profile_for(int from_index) const;

  /// Representative force over interval j -> j+1. When the trajectory carries
  /// any profiles they are authoritative (an interval without one is
  /// force-free) and the profile mean is used; otherwise the mean of the two
  /// endpoint setpoints.
  double interval_force(int from_index) const;

  /// An interval is forceful iff any profile sample (or the derived mean
  /// force) exceeds kForceEpsilon.
  bool interval_forceful(int from_index) const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

enum class Side { kLeft, kRight, kCenter };

std::string_view to_string(Side side);
Side side_from_string(std::string_view text);

struct BodyLandmark {
  std::string name;  // canonical, e.g. "left wrist"
  Side side = Side::kCenter;
  Eigen::Vector3d position_m = Eigen::Vector3d::Zero();
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
  bool facial = false;
  bool visible = true;

  friend bool operator==(const BodyLandmark&, const BodyLandmark&) = default;
};

struct BodyLandmarkSet {
  std::vector<BodyLandmark> entries;

  bool empty() const { return entries.empty(); }
  std::vector<const BodyLandmark*> facial() const;
  const BodyLandmark* find(std::string_view name) const;

  friend bool operator==(const BodyLandmarkSet&, const BodyLandmarkSet&) = default;
};

struct CanonicalLandmark {
  std::string_view name;
  Side side;
  bool facial;
};

/// The accepted landmark vocabulary (pose-model joint names).
std::span<const CanonicalLandmark> canonical_landmarks();
const CanonicalLandmark* find_canonical_landmark(std::string_view name);

struct CameraModel {
  Eigen::Matrix3d intrinsics = Eigen::Matrix3d::Identity();
  Eigen::Matrix4d extrinsics_base_to_camera = Eigen::Matrix4d::Identity();
  int image_width = 0;
  int image_height = 0;

  double fx() const { return intrinsics(0, 0); }
  double fy() const { return intrinsics(1, 1); }
  double cx() const { return intrinsics(0, 2); }
  double cy() const { return intrinsics(1, 2); }
  Eigen::Matrix3d rotation() const { return extrinsics_base_to_camera.topLeftCorner<3, 3>(); }

  friend bool operator==(const CameraModel&, const CameraModel&) = default;
};

struct SceneBundle {
  RgbImage environment_image;
  std::optional<RgbImage> wrist_image;
  BodyLandmarkSet landmarks;
  CameraModel camera;
  // Source paths, kept for serialization; empty for in-memory scenes.
  std::string environment_image_path;
  std::string wrist_image_path;
};

struct Violation {
  std::string invariant;
  int index = 0;  // offending waypoint / interval index, 0 when not applicable
  std::string message;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_trajectory(const Trajectory& trajectory);
ValidationReport validate_camera(const CameraModel& camera);
ValidationReport validate_landmarks(const BodyLandmarkSet& landmarks, int image_width, int image_height);
ValidationReport validate_scene(const SceneBundle& scene);

/// Throws ValidationError carrying every message of a non-empty report.
void throw_if_invalid(const ValidationReport& report, std::string_view what);

}  // namespace cori

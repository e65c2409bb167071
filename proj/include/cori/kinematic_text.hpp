#pragma once

#include <string>

#include <Eigen/Core>

#include "cori/core_model.hpp"

namespace cori {

struct NearestLandmark {
  std::string name;
  double distance_cm = 0.0;  // unrounded
};

/// Nearest visible landmark by 3D base-frame distance. Distances within
/// 1e-12 m count as ties and go to the lexicographically smaller name.
/// Throws std::invalid_argument when no visible landmark exists.
NearestLandmark nearest_landmark(const Eigen::Vector3d& position_m, const BodyLandmarkSet& landmarks);

struct SegmentKinematicReport {
  std::string gripper_line;
  std::string position_lines;
  std::string velocity_lines;
  std::string force_lines;
  std::string landmark_lines;  // landmark listing, newline, nearest-start/end sentences
  NearestLandmark nearest_start;
  NearestLandmark nearest_end;
};

inline constexpr const char* kNoForceSentence = "There is no external force planned during this section.";

/// Text rendering of waypoints range.first..range.last for image k.
SegmentKinematicReport render_kinematic_report(const Trajectory& trajectory, IndexRange range,
                                               const BodyLandmarkSet& landmarks, int k);

/// The "# Kinematic description for image k" prompt section.
std::string kinematic_section(int k, const SegmentKinematicReport& report);

}  // namespace cori

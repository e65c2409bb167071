#include "cori/kinematic_text.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cori/number_format.hpp"

namespace cori {

NearestLandmark nearest_landmark(const Eigen::Vector3d& position_m, const BodyLandmarkSet& landmarks) {
  const BodyLandmark* best = nullptr;
  double best_d = 0.0;
  for (const auto& l : landmarks.entries) {
    if (!l.visible) continue;
    const double d = (l.position_m - position_m).norm();
    if (best == nullptr || d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && l.name < best->name)) {
      best = &l;
      best_d = d;
    }
  }
  if (best == nullptr) throw std::invalid_argument("nearest_landmark: no visible landmarks");
  return {best->name, best_d * 100.0};
}

namespace {

std::string triple_cm(const Eigen::Vector3d& p) {
  return fmt::format("({}, {}, {})", format_cm(p.x()), format_cm(p.y()), format_cm(p.z()));
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

SegmentKinematicReport render_kinematic_report(const Trajectory& trajectory, IndexRange range,
                                               const BodyLandmarkSet& landmarks, int k) {
  if (range.first < 1 || range.last > trajectory.size() || range.first >= range.last) {
    throw std::invalid_argument(fmt::format("render_kinematic_report: invalid range [{}, {}]", range.first, range.last));
  }
  SegmentKinematicReport r;
  r.gripper_line = fmt::format("At the start of image {}, the gripper is {}.", k,
                               trajectory.at(range.first).gripper_closed ? "closed" : "open");

  std::vector<std::string> positions;
  std::vector<std::string> velocities;
  std::vector<std::string> forces;
  for (int i = range.first; i <= range.last; ++i) {
    const Waypoint& w = trajectory.at(i);
    positions.push_back(
        fmt::format("At waypoint {}, the position of the gripper center is at {}.", i, triple_cm(w.position_m)));
    if (i == range.last) break;
    const Waypoint& next = trajectory.at(i + 1);
    const Eigen::Vector3d delta = next.position_m - w.position_m;
    positions.push_back(fmt::format("From waypoint {} to waypoint {}, the general motion of the robot is {} centimeters.",
                                    i, i + 1, triple_cm(delta)));
    const double speed_m = delta.norm() / (next.timestamp_s - w.timestamp_s);
    velocities.push_back(fmt::format(
        "From waypoint {} to waypoint {}, the average velocity of the robot is {} centimeters per second.", i, i + 1,
        format_cm(speed_m)));
    if (trajectory.interval_forceful(i)) {
      std::vector<std::string> samples;
      if (const auto* profile = trajectory.profile_for(i)) {
        for (double s : profile->samples_n) samples.push_back(format_newtons(s));
      } else {
        samples = {format_newtons(w.force_n), format_newtons(next.force_n)};
      }
      forces.push_back(fmt::format(
          "From waypoint {} to waypoint {}, the force magnitude of the robot end-effector is: [{}].", i, i + 1,
          join(samples, ", ")));
    }
  }
  r.position_lines = join(positions, " ");
  r.velocity_lines = join(velocities, " ");
  r.force_lines = forces.empty() ? std::string(kNoForceSentence) : join(forces, " ");

  std::vector<std::string> listing;
  for (const auto& l : landmarks.entries) {
    if (l.visible) listing.push_back(fmt::format("{}: {} centimeters", l.name, triple_cm(l.position_m)));
  }
  r.nearest_start = nearest_landmark(trajectory.at(range.first).position_m, landmarks);
  r.nearest_end = nearest_landmark(trajectory.at(range.last).position_m, landmarks);
  r.landmark_lines = fmt::format(
      "The following are the positions for each of the detected body landmarks in the image: {}.\n"
      "The first waypoint in this segment is closest to the {} at a distance of {} centimeters. "
      "The last waypoint in this segment is closest to the {} at a distance of {} centimeters.",
      join(listing, ", "), r.nearest_start.name, format_fixed(r.nearest_start.distance_cm, 1), r.nearest_end.name,
      format_fixed(r.nearest_end.distance_cm, 1));
  return r;
}

std::string kinematic_section(int k, const SegmentKinematicReport& report) {
  return fmt::format(
      "# Kinematic description for image {}\n"
      "{}\n"
      "## Position descriptions\n{}\n"
      "## Velocity descriptions\n{}\n"
      "## Force descriptions\n{}\n"
      "## Human body landmark positions\n{}",
      k, report.gripper_line, report.position_lines, report.velocity_lines, report.force_lines,
      report.landmark_lines);
}

}  // namespace cori

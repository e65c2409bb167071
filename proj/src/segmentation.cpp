#include "cori/segmentation.hpp"

#include <map>
#include <stdexcept>

namespace cori {

std::string_view to_string(BoundaryReason reason) {
  switch (reason) {
    case BoundaryReason::kGripperChange:
      return "gripper_change";
    case BoundaryReason::kForceOnset:
      return "force_onset";
    case BoundaryReason::kForceTermination:
      return "force_termination";
    case BoundaryReason::kPause:
      return "pause";
  }
  return "unknown";
}

SegmentationResult segment_trajectory(const Trajectory& trajectory, double pause_threshold_s) {
  const int n = trajectory.size();
  if (n < 1) throw std::invalid_argument("segment_trajectory: empty trajectory");

  std::map<int, std::vector<BoundaryReason>> found;
  auto mark = [&](int index, BoundaryReason reason) {
    if (index <= 1 || index >= n) return;
    found[index].push_back(reason);
  };

  std::vector<char> forceful(static_cast<std::size_t>(n), 0);  // forceful[j] for interval j -> j+1
  for (int j = 1; j < n; ++j) forceful[static_cast<std::size_t>(j)] = trajectory.interval_forceful(j) ? 1 : 0;

  for (int j = 1; j < n; ++j) {
    const auto& a = trajectory.at(j);
    const auto& b = trajectory.at(j + 1);
    if (a.gripper_closed != b.gripper_closed) mark(j + 1, BoundaryReason::kGripperChange);
    if (j >= 2) {
      const bool before = forceful[static_cast<std::size_t>(j - 1)] != 0;
      const bool after = forceful[static_cast<std::size_t>(j)] != 0;
      if (!before && after) mark(j, BoundaryReason::kForceOnset);
      if (before && !after) mark(j, BoundaryReason::kForceTermination);
    }
    const bool stationary = ((b.position_m - a.position_m).cwiseAbs().array() <= kStationaryEpsilonM).all();
    if (stationary && b.timestamp_s - a.timestamp_s > pause_threshold_s) mark(j, BoundaryReason::kPause);
  }

  SegmentationResult result;
  int start = 1;
  for (auto& [index, reasons] : found) {
    result.boundaries.push_back(index);
    result.reasons.push_back(std::move(reasons));
    result.ranges.push_back({start, index});
    start = index;
  }
  result.ranges.push_back({start, n});
  return result;
}

}  // namespace cori

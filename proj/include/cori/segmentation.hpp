#pragma once

#include <string_view>
#include <vector>

#include "cori/core_model.hpp"

namespace cori {

enum class BoundaryReason { kGripperChange, kForceOnset, kForceTermination, kPause };

std::string_view to_string(BoundaryReason reason);

/// Interaction-aware decomposition of a trajectory. Ranges share their
/// boundary waypoint: ranges[k].last == ranges[k + 1].first.
struct SegmentationResult {
  std::vector<int> boundaries;                         // strictly increasing waypoint indices
  std::vector<std::vector<BoundaryReason>> reasons;    // parallel to boundaries
  std::vector<IndexRange> ranges;                      // boundaries.size() + 1 entries

  int segment_count() const { return static_cast<int>(ranges.size()); }
};

inline constexpr double kDefaultPauseThresholdS = 2.0;

/// Boundaries are placed at
///   - the later waypoint of a pair whose gripper state differs,
///   - the waypoint shared by two intervals whose forceful status differs,
///   - the earlier waypoint of a stationary pair whose time gap exceeds
///     pause_threshold_s.
/// Events landing on the first or last waypoint would only produce a
/// single-waypoint segment and are not boundaries.
SegmentationResult segment_trajectory(const Trajectory& trajectory,
                                      double pause_threshold_s = kDefaultPauseThresholdS);

/// Positions closer than this (per component, meters) count as unchanged.
inline constexpr double kStationaryEpsilonM = 1e-9;

}  // namespace cori

#pragma once

// Reference implementations written without the library's helpers. Tests
// compare the library against these.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cori/core_model.hpp"

namespace cori::oracle {

// ---- segmentation ------------------------------------------------------

inline bool interval_has_force(const Trajectory& t, int j) {
  const std::size_t idx = static_cast<std::size_t>(j - 1);
  if (!t.force_profiles.empty()) {
    for (const auto& p : t.force_profiles) {
      if (p.from_index != j) continue;
      for (double s : p.samples_n) {
        if (s > 1e-6) return true;
      }
      return false;
    }
    return false;
  }
  return (t.waypoints[idx].force_n + t.waypoints[idx + 1].force_n) / 2.0 > 1e-6;
}

struct OracleBoundary {
  int index;
  std::vector<std::string> reasons;
};

/// Evaluates every criterion on every candidate waypoint b in 2..N-1.
inline std::vector<OracleBoundary> scan_boundaries(const Trajectory& t, double pause_threshold_s) {
  const int n = static_cast<int>(t.waypoints.size());
  auto w = [&](int i) -> const Waypoint& { return t.waypoints[static_cast<std::size_t>(i - 1)]; };
  std::vector<OracleBoundary> out;
  for (int b = 2; b <= n - 1; ++b) {
    std::vector<std::string> reasons;
    if (w(b - 1).gripper_closed != w(b).gripper_closed) reasons.push_back("gripper_change");
    const bool before = interval_has_force(t, b - 1);
    const bool after = interval_has_force(t, b);
    if (!before && after) reasons.push_back("force_onset");
    if (before && !after) reasons.push_back("force_termination");
    bool same = true;
    for (int c = 0; c < 3; ++c) same = same && std::fabs(w(b + 1).position_m[c] - w(b).position_m[c]) <= 1e-9;
    if (same && w(b + 1).timestamp_s - w(b).timestamp_s > pause_threshold_s) reasons.push_back("pause");
    if (!reasons.empty()) out.push_back({b, reasons});
  }
  return out;
}

// ---- projection ----------------------------------------------------------

/// Homogeneous 4x4 extrinsics product, then the 3x3 intrinsics product, then
/// the perspective divide, with plain arrays.
inline std::optional<std::array<double, 2>> project(const double extrinsics[4][4], const double intrinsics[3][3],
                                                    const double point[3]) {
  const double ph[4] = {point[0], point[1], point[2], 1.0};
  double pc[4] = {0, 0, 0, 0};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) pc[r] += extrinsics[r][c] * ph[c];
  }
  if (!(pc[2] > 0.0)) return std::nullopt;
  double uvw[3] = {0, 0, 0};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) uvw[r] += intrinsics[r][c] * pc[c];
  }
  return std::array<double, 2>{uvw[0] / uvw[2], uvw[1] / uvw[2]};
}

inline std::optional<std::array<double, 2>> project(const CameraModel& cam, const Eigen::Vector3d& p) {
  double e[4][4];
  double k[3][3];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) e[r][c] = cam.extrinsics_base_to_camera(r, c);
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) k[r][c] = cam.intrinsics(r, c);
  }
  const double pt[3] = {p.x(), p.y(), p.z()};
  return project(e, k, pt);
}

// ---- nearest landmark --------------------------------------------------

/// Exhaustive scan: all distances first, then the smallest; names sorted to
/// settle ties within 1e-12 m.
inline std::pair<std::string, double> nearest(const Eigen::Vector3d& p, const BodyLandmarkSet& set) {
  std::vector<std::pair<double, std::string>> all;
  for (const auto& l : set.entries) {
    if (!l.visible) continue;
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += (l.position_m[c] - p[c]) * (l.position_m[c] - p[c]);
    all.emplace_back(std::sqrt(s), l.name);
  }
  double best = all.front().first;
  for (const auto& a : all) best = std::min(best, a.first);
  std::vector<std::string> tied;
  for (const auto& a : all) {
    if (a.first - best <= 1e-12) tied.push_back(a.second);
  }
  std::sort(tied.begin(), tied.end());
  for (const auto& a : all) {
    if (a.second == tied.front()) return {a.second, a.first * 100.0};
  }
  return {};
}

// ---- statement markers ---------------------------------------------------

struct Marker {
  int k;
  std::size_t begin;
  std::size_t end;
};

/// Hand-written scanner for: "Statement" [ \t\n\r\f\v]+ [0-9]+ [ \t\n\r\f\v]* ":"
inline std::vector<Marker> scan_markers(const std::string& s) {
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  static const std::string word = "Statement";
  std::vector<Marker> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, word.size(), word) != 0) {
      ++i;
      continue;
    }
    std::size_t j = i + word.size();
    std::size_t ws = j;
    while (j < s.size() && space(s[j])) ++j;
    if (j == ws || j >= s.size() || !digit(s[j])) {
      ++i;
      continue;
    }
    int k = 0;
    while (j < s.size() && digit(s[j])) k = k * 10 + (s[j++] - '0');
    while (j < s.size() && space(s[j])) ++j;
    if (j >= s.size() || s[j] != ':') {
      ++i;
      continue;
    }
    out.push_back({k, i, j + 1});
    i = j + 1;
  }
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (b < e && space(s[b])) ++b;
  while (e > b && space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

/// Statements 1..expected in order, or nullopt when the markers differ.
inline std::optional<std::vector<std::string>> statements(const std::string& s, int expected) {
  const auto m = scan_markers(s);
  if (static_cast<int>(m.size()) != expected) return std::nullopt;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].k != static_cast<int>(i) + 1) return std::nullopt;
    const std::size_t stop = i + 1 < m.size() ? m[i + 1].begin : s.size();
    out.push_back(trim(s.substr(m[i].end, stop - m[i].end)));
    if (out.back().empty()) return std::nullopt;
  }
  return out;
}

}  // namespace cori::oracle

#pragma once

#include <filesystem>
#include <string>

#include "cori/core_model.hpp"
#include "cori/json_io.hpp"

namespace cori::testing {

inline std::filesystem::path source_dir() { return CORI_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& rel) { return source_dir() / "fixtures" / rel; }
inline std::filesystem::path golden(const std::string& rel) { return source_dir() / "tests" / "golden" / rel; }
inline bool update_golden() {
  const char* v = std::getenv("CORI_UPDATE_GOLDEN");
  return v != nullptr && std::string(v) == "1";
}

inline std::pair<SceneBundle, Trajectory> load_bathing() {
  return load_scene_and_trajectory(fixture("bathing/scene.json"), fixture("bathing/trajectory.json"));
}

inline Waypoint wp(int index, double t, Eigen::Vector3d p, bool gripper = false, double v = 0.0, double f = 0.0) {
  Waypoint w;
  w.index = index;
  w.timestamp_s = t;
  w.position_m = p;
  w.gripper_closed = gripper;
  w.speed_mps = v;
  w.force_n = f;
  return w;
}

/// Straight line along +x, one waypoint per second.
inline Trajectory line_trajectory(int n, double step_m = 0.01) {
  Trajectory t;
  for (int i = 1; i <= n; ++i) t.waypoints.push_back(wp(i, i - 1.0, Eigen::Vector3d(step_m * (i - 1), 0.0, 0.0)));
  return t;
}

inline BodyLandmark landmark(const std::string& name, Side side, Eigen::Vector3d pos, Eigen::Vector2d px,
                             bool facial = false) {
  BodyLandmark l;
  l.name = name;
  l.side = side;
  l.position_m = pos;
  l.pixel = px;
  l.facial = facial;
  return l;
}

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace cori::testing

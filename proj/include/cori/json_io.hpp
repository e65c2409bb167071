#pragma once

#include <filesystem>
#include <string>
#include <utility>

#include "cori/core_model.hpp"
#include "json.hpp"

namespace cori {

using json = nlohmann::json;

// Trajectory document:
//   {"waypoints": [{"index", "t", "p": [x,y,z], "gripper_closed", "v", "f"}],
//    "force_profiles": [{"from_index", "samples": [...]}]}
Trajectory trajectory_from_json(const json& doc);
json trajectory_to_json(const Trajectory& trajectory);
Trajectory load_trajectory(const std::filesystem::path& path);

// Landmark list: [{"name", "side", "position_m": [..], "pixel": [u,v],
// "facial": bool, "visible": bool (optional, default true)}]. A standalone
// landmark file wraps the list as {"landmarks": [...]}.
BodyLandmarkSet landmarks_from_json(const json& list);
json landmarks_to_json(const BodyLandmarkSet& landmarks);

CameraModel camera_from_json(const json& doc);
json camera_to_json(const CameraModel& camera);

/// Scene document. Image paths and a string-valued "landmarks" entry (path
/// to a landmark file) are resolved relative to the scene file.
SceneBundle load_scene(const std::filesystem::path& path);
json scene_to_json(const SceneBundle& scene);

/// Loads and fully validates both inputs; throws ParseError or
/// ValidationError.
std::pair<SceneBundle, Trajectory> load_scene_and_trajectory(const std::filesystem::path& scene_path,
                                                             const std::filesystem::path& trajectory_path);

json read_json_file(const std::filesystem::path& path);

}  // namespace cori

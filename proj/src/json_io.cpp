#include "cori/json_io.hpp"

#include <fmt/format.h>

#include <fstream>

#include "cori/errors.hpp"

namespace cori {

namespace {

template <typename T>
T field(const json& obj, const char* key, std::string_view where) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(fmt::format("{}: missing field '{}'", where, key));
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: field '{}' has the wrong type ({})", where, key, e.what()));
  }
}

std::vector<double> number_array(const json& obj, const char* key, std::size_t expected, std::string_view where) {
  auto values = field<std::vector<double>>(obj, key, where);
  if (expected != 0 && values.size() != expected) {
    throw ParseError(fmt::format("{}: field '{}' must have {} entries, got {}", where, key, expected, values.size()));
  }
  return values;
}

Eigen::Vector3d vec3(const json& obj, const char* key, std::string_view where) {
  const auto v = number_array(obj, key, 3, where);
  return {v[0], v[1], v[2]};
}

json vec_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

Trajectory trajectory_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("trajectory: document must be an object");
  Trajectory t;
  const auto waypoints = field<json>(doc, "waypoints", "trajectory");
  if (!waypoints.is_array()) throw ParseError("trajectory: 'waypoints' must be an array");
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const auto& w = waypoints[i];
    const auto where = fmt::format("trajectory waypoint #{}", i + 1);
    Waypoint wp;
    wp.index = field<int>(w, "index", where);
    wp.timestamp_s = field<double>(w, "t", where);
    wp.position_m = vec3(w, "p", where);
    wp.gripper_closed = field<bool>(w, "gripper_closed", where);
    wp.speed_mps = field<double>(w, "v", where);
    wp.force_n = field<double>(w, "f", where);
    t.waypoints.push_back(std::move(wp));
  }
  if (doc.contains("force_profiles")) {
    const auto& profiles = doc.at("force_profiles");
    if (!profiles.is_array()) throw ParseError("trajectory: 'force_profiles' must be an array");
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      const auto where = fmt::format("trajectory force profile #{}", i + 1);
      IntervalForceProfile p;
      p.from_index = field<int>(profiles[i], "from_index", where);
      p.samples_n = number_array(profiles[i], "samples", 0, where);
      t.force_profiles.push_back(std::move(p));
    }
  }
  return t;
}

json trajectory_to_json(const Trajectory& trajectory) {
  json waypoints = json::array();
  for (const auto& w : trajectory.waypoints) {
    waypoints.push_back({{"index", w.index},
                         {"t", w.timestamp_s},
                         {"p", vec_json(w.position_m)},
                         {"gripper_closed", w.gripper_closed},
                         {"v", w.speed_mps},
                         {"f", w.force_n}});
  }
  json profiles = json::array();
  for (const auto& p : trajectory.force_profiles) {
    profiles.push_back({{"from_index", p.from_index}, {"samples", p.samples_n}});
  }
  return {{"waypoints", waypoints}, {"force_profiles", profiles}};
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  auto trajectory = trajectory_from_json(read_json_file(path));
  throw_if_invalid(validate_trajectory(trajectory), "trajectory");
  return trajectory;
}

BodyLandmarkSet landmarks_from_json(const json& list) {
  if (!list.is_array()) throw ParseError("landmarks: expected an array");
  BodyLandmarkSet set;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& e = list[i];
    const auto where = fmt::format("landmark #{}", i + 1);
    BodyLandmark l;
    l.name = field<std::string>(e, "name", where);
    l.side = side_from_string(field<std::string>(e, "side", where));
    l.position_m = vec3(e, "position_m", where);
    const auto px = number_array(e, "pixel", 2, where);
    l.pixel = {px[0], px[1]};
    l.facial = e.contains("facial") ? field<bool>(e, "facial", where) : false;
    l.visible = e.contains("visible") ? field<bool>(e, "visible", where) : true;
    set.entries.push_back(std::move(l));
  }
  return set;
}

json landmarks_to_json(const BodyLandmarkSet& landmarks) {
  json list = json::array();
  for (const auto& l : landmarks.entries) {
    list.push_back({{"name", l.name},
                    {"side", std::string(to_string(l.side))},
                    {"position_m", vec_json(l.position_m)},
                    {"pixel", vec_json(l.pixel)},
                    {"facial", l.facial},
                    {"visible", l.visible}});
  }
  return list;
}

CameraModel camera_from_json(const json& doc) {
  CameraModel cam;
  const auto k = number_array(doc, "intrinsics", 9, "camera");
  const auto e = number_array(doc, "extrinsics_base_to_camera", 16, "camera");
  const auto size = field<std::vector<int>>(doc, "image_size", "camera");
  if (size.size() != 2) throw ParseError("camera: 'image_size' must be [width, height]");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) cam.intrinsics(r, c) = k[static_cast<std::size_t>(r * 3 + c)];
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) cam.extrinsics_base_to_camera(r, c) = e[static_cast<std::size_t>(r * 4 + c)];
  cam.image_width = size[0];
  cam.image_height = size[1];
  return cam;
}

json camera_to_json(const CameraModel& camera) {
  json k = json::array();
  json e = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) k.push_back(camera.intrinsics(r, c));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) e.push_back(camera.extrinsics_base_to_camera(r, c));
  return {{"intrinsics", k},
          {"extrinsics_base_to_camera", e},
          {"image_size", {camera.image_width, camera.image_height}}};
}

SceneBundle load_scene(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  const auto base = path.parent_path();
  SceneBundle scene;
  scene.environment_image_path = field<std::string>(doc, "environment_image", "scene");
  scene.environment_image = read_png(base / scene.environment_image_path);
  if (doc.contains("wrist_image") && !doc.at("wrist_image").is_null()) {
    scene.wrist_image_path = field<std::string>(doc, "wrist_image", "scene");
    scene.wrist_image = read_png(base / scene.wrist_image_path);
  }
  scene.camera = camera_from_json(field<json>(doc, "camera", "scene"));
  const auto landmarks = field<json>(doc, "landmarks", "scene");
  if (landmarks.is_string()) {
    const auto file = read_json_file(base / landmarks.get<std::string>());
    scene.landmarks = landmarks_from_json(field<json>(file, "landmarks", "landmark file"));
  } else {
    scene.landmarks = landmarks_from_json(landmarks);
  }
  return scene;
}

json scene_to_json(const SceneBundle& scene) {
  json doc = {{"environment_image", scene.environment_image_path},
              {"camera", camera_to_json(scene.camera)},
              {"landmarks", landmarks_to_json(scene.landmarks)}};
  doc["wrist_image"] = scene.wrist_image_path.empty() ? json(nullptr) : json(scene.wrist_image_path);
  return doc;
}

std::pair<SceneBundle, Trajectory> load_scene_and_trajectory(const std::filesystem::path& scene_path,
                                                             const std::filesystem::path& trajectory_path) {
  auto scene = load_scene(scene_path);
  throw_if_invalid(validate_scene(scene), "scene");
  auto trajectory = load_trajectory(trajectory_path);
  return {std::move(scene), std::move(trajectory)};
}

}  // namespace cori

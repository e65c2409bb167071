#include "cori/config.hpp"

#include <fmt/format.h>

#include <set>

#include "cori/errors.hpp"
#include "cori/json_io.hpp"

namespace cori {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

Rgb rgb_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<int>>();
  if (v.size() != 3) throw ParseError("color must have 3 components");
  for (int c : v) {
    if (c < 0 || c > 255) throw ParseError("color component out of range");
  }
  return {static_cast<std::uint8_t>(v[0]), static_cast<std::uint8_t>(v[1]), static_cast<std::uint8_t>(v[2])};
}

void apply_render(const nlohmann::json& j, RenderStyle& s) {
  for (const auto& [key, value] : j.items()) {
    if (key == "whitening") s.whitening = value.get<double>();
    else if (key == "marker_side_px") s.marker_side_px = value.get<int>();
    else if (key == "waypoint_radius_px") s.waypoint_radius_px = value.get<int>();
    else if (key == "line_thickness_px") s.line_thickness_px = value.get<double>();
    else if (key == "axes_arm_px") s.axes_arm_px = value.get<int>();
    else if (key == "axes_origin_px") s.axes_origin_px = value.get<int>();
    else if (key == "axes_thickness_px") s.axes_thickness_px = value.get<double>();
    else if (key == "crop_pad_fraction") s.crop_pad_fraction = value.get<double>();
    else if (key == "crop_pad_min_px") s.crop_pad_min_px = value.get<int>();
    else if (key == "start_color") s.start_color = rgb_from_json(value);
    else if (key == "end_color") s.end_color = rgb_from_json(value);
    else throw ParseError(fmt::format("config: unknown render key '{}'", key));
  }
  if (s.whitening < 0.0 || s.whitening > 1.0) throw ParseError("config: render.whitening must be in [0, 1]");
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir, RunConfig c) {
  if (!doc.is_object()) throw ParseError("config: expected a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "scene") c.scene_path = resolve(base_dir, value.get<std::string>());
      else if (key == "trajectory") c.trajectory_path = resolve(base_dir, value.get<std::string>());
      else if (key == "out") c.out_dir = resolve(base_dir, value.get<std::string>());
      else if (key == "mock_transcript") c.mock_transcript = resolve(base_dir, value.get<std::string>());
      else if (key == "template_dir") c.template_dir = resolve(base_dir, value.get<std::string>());
      else if (key == "ground_truth_dir") c.ground_truth_dir = resolve(base_dir, value.get<std::string>());
      else if (key == "scorer_url") c.scorer_url = value.get<std::string>();
      else if (key == "pause_threshold_s") c.pause_threshold_s = value.get<double>();
      else if (key == "speech_rate_wpm") c.speech_rate_wpm = value.get<double>();
      else if (key == "vlm_model") c.model.vlm_model = value.get<std::string>();
      else if (key == "reasoning_model") c.model.reasoning_model = value.get<std::string>();
      else if (key == "api_base_url") c.model.api_base_url = value.get<std::string>();
      else if (key == "api_key_env_var") c.model.api_key_env_var = value.get<std::string>();
      else if (key == "timeout_s") c.model.timeout_s = value.get<double>();
      else if (key == "retry_limit") c.model.retry_limit = value.get<int>();
      else if (key == "temperature") c.model.temperature = value.is_null() ? std::nullopt : std::optional(value.get<double>());
      else if (key == "render") apply_render(value, c.render);
      else throw ParseError(fmt::format("config: unknown key '{}'", key));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("config: {}", e.what()));
  }
  if (c.model.retry_limit < 0) throw ParseError("config: retry_limit must be >= 0");
  if (!(c.model.timeout_s > 0.0)) throw ParseError("config: timeout_s must be positive");
  if (!(c.speech_rate_wpm > 0.0)) throw ParseError("config: speech_rate_wpm must be positive");
  if (!(c.pause_threshold_s >= 0.0)) throw ParseError("config: pause_threshold_s must be nonnegative");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig defaults) {
  return run_config_from_json(read_json_file(path), path.parent_path(), std::move(defaults));
}

PipelineOptions pipeline_options(const RunConfig& config) {
  PipelineOptions o;
  o.vlm_model = config.model.vlm_model;
  o.reasoning_model = config.model.reasoning_model;
  o.temperature = config.model.temperature;
  o.retry_limit = config.model.retry_limit;
  o.pause_threshold_s = config.pause_threshold_s;
  o.template_dir = config.template_dir;
  o.render_style = config.render;
  return o;
}

HttpTransportOptions transport_options(const ModelConfig& model) {
  HttpTransportOptions o;
  o.base_url = model.api_base_url;
  o.api_key_env_var = model.api_key_env_var;
  o.timeout_s = model.timeout_s;
  return o;
}

}  // namespace cori

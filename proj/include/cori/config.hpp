#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "cori/model_client.hpp"
#include "cori/overlay_renderer.hpp"
#include "cori/prompt_pipeline.hpp"
#include "json.hpp"

namespace cori {

struct ModelConfig {
  std::string vlm_model = "gpt-4o";
  std::string reasoning_model = "o3-mini";
  std::string api_base_url = "https://api.openai.com/v1";
  std::string api_key_env_var = "OPENAI_API_KEY";
  double timeout_s = 120.0;
  int retry_limit = 2;
  std::optional<double> temperature = 0.0;  // null in the file omits it from requests
};

struct RunConfig {
  std::filesystem::path scene_path;
  std::filesystem::path trajectory_path;
  std::filesystem::path out_dir = "out";
  std::optional<std::filesystem::path> mock_transcript;
  ModelConfig model;
  double pause_threshold_s = kDefaultPauseThresholdS;
  double speech_rate_wpm = 150.0;
  std::filesystem::path template_dir;  // empty: default_template_dir()
  RenderStyle render;
  std::string scorer_url = "http://127.0.0.1:8000";
  std::filesystem::path ground_truth_dir;
};

/// Keys: scene, trajectory, out, mock_transcript, pause_threshold_s,
/// speech_rate_wpm, template_dir, scorer_url, ground_truth_dir, the model
/// keys (vlm_model, reasoning_model, api_base_url, api_key_env_var,
/// timeout_s, retry_limit, temperature) and a "render" object overriding
/// RenderStyle fields. Paths resolve relative to base_dir. Unknown keys are
/// a ParseError.
RunConfig run_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {},
                               RunConfig defaults = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig defaults = {});

PipelineOptions pipeline_options(const RunConfig& config);
HttpTransportOptions transport_options(const ModelConfig& model);

}  // namespace cori

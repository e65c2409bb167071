#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cori/annotation.hpp"
#include "cori/core_model.hpp"
#include "cori/errors.hpp"
#include "cori/kinematic_text.hpp"
#include "cori/model_client.hpp"
#include "cori/overlay_renderer.hpp"
#include "cori/segmentation.hpp"
#include "cori/templates.hpp"

namespace cori {

struct Prompt {
  std::string text;
  std::vector<RgbImage> images;  // attached in order
};

struct StageOutputs {
  std::string environment_summary;
  std::optional<std::string> held_object_description;
  std::vector<std::string> segment_descriptions;
  std::string overall_intention;
  std::vector<std::string> user_cooperation;  // one per segment, "none" when not stated
};

struct CommunicationPlan {
  std::vector<std::string> statements;
  std::string overall_intention;
  StageOutputs source_outputs;
};

/// Heading lookup failed. Carries the full response for retry handling.
class MissingHeadingError : public ParseError {
 public:
  MissingHeadingError(const std::string& heading, std::string response);
  const std::string& heading() const { return heading_; }
  const std::string& response() const { return response_; }

 private:
  std::string heading_;
  std::string response_;
};

/// "Statement k:" markers were not exactly 1..expected.
class StatementFormatError : public ParseError {
 public:
  StatementFormatError(int expected, std::vector<int> found, std::string response);
  const std::vector<int>& found() const { return found_; }
  const std::string& response() const { return response_; }

 private:
  std::vector<int> found_;
  std::string response_;
};

/// Stage failure after retries: stage name, 1-based segment index (0 when
/// not segment-specific) and the last raw response.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, int segment_index, std::string raw_response, const std::string& detail);
  const std::string& stage() const { return stage_; }
  int segment_index() const { return segment_index_; }
  const std::string& raw_response() const { return raw_response_; }

 private:
  std::string stage_;
  int segment_index_;
  std::string raw_response_;
};

Prompt build_environment_prompt(const PromptTemplates& templates, const AnnotatedScene& scene,
                                const RgbImage* wrist_image, bool gripper_closed_at_start);

/// Preamble, kinematic section and questions separated by blank lines; the
/// final addendum follows the questions on the next line when is_last.
Prompt build_segment_prompt(const PromptTemplates& templates, int k, const SegmentKinematicReport& report,
                            const RenderedSegmentView& view, bool is_last);

std::string build_generation_prompt(const PromptTemplates& templates, const StageOutputs& outputs);

/// Body under the first line reading "## <heading>" (two or more '#',
/// case-insensitive, optional trailing ':'), up to the next line starting
/// with '#', trimmed. Throws MissingHeadingError.
std::string extract_section(const std::string& response, const std::string& heading);
std::optional<std::string> find_section(const std::string& response, const std::string& heading);

/// "- Segment k: text" lines of a cooperation section, as a list of
/// segment_count entries defaulting to "none".
std::vector<std::string> parse_cooperation(const std::string& section, int segment_count);

std::vector<std::string> parse_statements(const std::string& response, int expected_count);

inline constexpr const char* kCorrectiveInstruction =
    "Your previous response was missing the required heading/format";

struct PipelineOptions {
  std::string vlm_model = "gpt-4o";
  std::string reasoning_model = "o3-mini";
  std::optional<double> temperature = 0.0;
  int retry_limit = 2;
  double pause_threshold_s = kDefaultPauseThresholdS;
  std::filesystem::path template_dir;  // empty: default_template_dir()
  AnnotationStyle annotation_style;
  RenderStyle render_style;
};

struct TranscriptEntry {
  std::string stage;  // environment | segment | generation
  int segment_index = 0;
  bool corrective = false;
  std::string prompt;
  std::size_t image_count = 0;
  std::string response;
};

struct PipelineResult {
  CommunicationPlan plan;
  AnnotatedScene annotated;
  SegmentationResult segmentation;
  std::vector<RenderedSegmentView> views;
  std::vector<SegmentKinematicReport> reports;
  std::vector<TranscriptEntry> transcript;
  int retries = 0;
};

struct ModelTransports {
  std::shared_ptr<Transport> vlm;
  std::shared_ptr<Transport> reasoning;  // may equal vlm
};

/// annotate -> segment -> render -> environment turn -> one turn per segment
/// in a single VLM conversation -> a fresh reasoning-model conversation for
/// the statements.
PipelineResult run_pipeline(const SceneBundle& scene, const Trajectory& trajectory, const ModelTransports& transports,
                            const PipelineOptions& options = {});

nlohmann::json plan_to_json(const CommunicationPlan& plan);
nlohmann::json transcript_to_json(const std::vector<TranscriptEntry>& transcript);

}  // namespace cori

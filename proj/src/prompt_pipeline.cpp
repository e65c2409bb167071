#include "cori/prompt_pipeline.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

namespace cori {

MissingHeadingError::MissingHeadingError(const std::string& heading, std::string response)
    : ParseError(fmt::format("missing heading '## {}'", heading)), heading_(heading), response_(std::move(response)) {}

StatementFormatError::StatementFormatError(int expected, std::vector<int> found, std::string response)
    : ParseError(fmt::format("expected statements 1..{}, found markers [{}]", expected, fmt::join(found, ", "))),
      found_(std::move(found)),
      response_(std::move(response)) {}

PipelineError::PipelineError(std::string stage, int segment_index, std::string raw_response, const std::string& detail)
    : std::runtime_error(segment_index > 0 ? fmt::format("{} stage, segment {}: {}", stage, segment_index, detail)
                                           : fmt::format("{} stage: {}", stage, detail)),
      stage_(std::move(stage)),
      segment_index_(segment_index),
      raw_response_(std::move(raw_response)) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string rtrim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool is_heading_line(const std::string& line, const std::string& wanted_lower) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  std::size_t hashes = 0;
  while (i < line.size() && line[i] == '#') {
    ++hashes;
    ++i;
  }
  if (hashes < 2) return false;
  std::string title = trim(std::string_view(line).substr(i));
  if (!title.empty() && title.back() == ':') title = trim(std::string_view(title).substr(0, title.size() - 1));
  return lower(title) == wanted_lower;
}

bool starts_heading(const std::string& line) {
  const auto b = line.find_first_not_of(" \t");
  return b != std::string::npos && line[b] == '#';
}

}  // namespace

std::optional<std::string> find_section(const std::string& response, const std::string& heading) {
  const std::string wanted = lower(trim(heading));
  const auto lines = split_lines(response);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!is_heading_line(lines[i], wanted)) continue;
    std::string body;
    for (std::size_t j = i + 1; j < lines.size() && !starts_heading(lines[j]); ++j) {
      body += lines[j];
      body += '\n';
    }
    return trim(body);
  }
  return std::nullopt;
}

std::string extract_section(const std::string& response, const std::string& heading) {
  auto body = find_section(response, heading);
  if (!body) throw MissingHeadingError(heading, response);
  return *body;
}

std::vector<std::string> parse_cooperation(const std::string& section, int segment_count) {
  static const std::regex line_re(R"(^\s*(?:[-*]\s*)?Segment\s+(\d+)\s*:\s*(.*?)\s*$)", std::regex::icase);
  std::vector<std::string> out(static_cast<std::size_t>(std::max(segment_count, 0)), "none");
  for (const auto& line : split_lines(section)) {
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) continue;
    const int k = m[1].length() > 6 ? -1 : std::stoi(m[1].str());
    if (k >= 1 && k <= segment_count && !m[2].str().empty()) out[static_cast<std::size_t>(k - 1)] = m[2].str();
  }
  return out;
}

std::vector<std::string> parse_statements(const std::string& response, int expected_count) {
  if (expected_count < 1) throw std::invalid_argument("parse_statements: expected_count must be >= 1");
  static const std::regex marker(R"(Statement\s+(\d+)\s*:)");
  struct Hit {
    int k;
    std::size_t begin;
    std::size_t end;
  };
  std::vector<Hit> hits;
  for (auto it = std::sregex_iterator(response.begin(), response.end(), marker); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const int k = m[1].length() > 6 ? -1 : std::stoi(m[1].str());
    hits.push_back({k, static_cast<std::size_t>(m.position(0)),
                    static_cast<std::size_t>(m.position(0) + m.length(0))});
  }
  std::vector<int> found;
  for (const auto& h : hits) found.push_back(h.k);
  bool ok = static_cast<int>(hits.size()) == expected_count;
  for (std::size_t i = 0; ok && i < hits.size(); ++i) ok = hits[i].k == static_cast<int>(i) + 1;
  if (!ok) throw StatementFormatError(expected_count, std::move(found), response);

  std::vector<std::string> out;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const std::size_t stop = i + 1 < hits.size() ? hits[i + 1].begin : response.size();
    std::string text = trim(std::string_view(response).substr(hits[i].end, stop - hits[i].end));
    if (text.empty()) throw StatementFormatError(expected_count, found, response);
    out.push_back(std::move(text));
  }
  return out;
}

Prompt build_environment_prompt(const PromptTemplates& templates, const AnnotatedScene& scene,
                                const RgbImage* wrist_image, bool gripper_closed_at_start) {
  Prompt p;
  p.text = rtrim(render_template(templates.environment,
                                 {{"wrist_image", wrist_image != nullptr}, {"holding", gripper_closed_at_start}}));
  p.images.push_back(scene.annotated_image);
  if (wrist_image != nullptr) p.images.push_back(*wrist_image);
  return p;
}

Prompt build_segment_prompt(const PromptTemplates& templates, int k, const SegmentKinematicReport& report,
                            const RenderedSegmentView& view, bool is_last) {
  Prompt p;
  p.text = rtrim(render_template(templates.trajectory_preamble, {})) + "\n\n" + kinematic_section(k, report) +
           "\n\n" + rtrim(render_template(templates.task_questions, {}));
  if (is_last) p.text += "\n" + rtrim(render_template(templates.final_addendum, {}));
  p.images.push_back(view.full_image);
  p.images.push_back(view.crop_image);
  return p;
}

std::string build_generation_prompt(const PromptTemplates& templates, const StageOutputs& outputs) {
  std::string segments;
  std::string cooperation;
  for (std::size_t i = 0; i < outputs.segment_descriptions.size(); ++i) {
    if (i > 0) segments += '\n';
    segments += fmt::format("- Segment {}: {}", i + 1, outputs.segment_descriptions[i]);
  }
  for (std::size_t i = 0; i < outputs.user_cooperation.size(); ++i) {
    if (i > 0) cooperation += '\n';
    cooperation += fmt::format("- Segment {}: {}", i + 1, outputs.user_cooperation[i]);
  }
  return rtrim(render_template(templates.generation, {{"environment", outputs.environment_summary},
                                                      {"segments", segments},
                                                      {"intention", outputs.overall_intention},
                                                      {"cooperation", cooperation}}));
}

namespace {

class Conversation {
 public:
  Conversation(ChatSession& session, std::vector<TranscriptEntry>& transcript, int retry_limit, int& retries)
      : session_(session), transcript_(transcript), retry_limit_(retry_limit), retries_(retries) {}

  // Sends the prompt, then corrective turns while `accept` throws ParseError.
  template <typename Accept>
  void exchange(const std::string& stage, int segment, const Prompt& prompt, const std::string& correction_hint,
                Accept&& accept) {
    std::vector<const RgbImage*> images;
    for (const auto& img : prompt.images) images.push_back(&img);
    std::string response = send(stage, segment, false, prompt.text, images);
    for (int attempt = 0;; ++attempt) {
      try {
        accept(response);
        return;
      } catch (const ParseError& e) {
        if (attempt >= retry_limit_) throw PipelineError(stage, segment, response, e.what());
        spdlog::warn("{} response{} rejected ({}); corrective retry {}/{}", stage,
                     segment > 0 ? fmt::format(" for segment {}", segment) : "", e.what(), attempt + 1, retry_limit_);
        ++retries_;
        response = send(stage, segment, true, fmt::format("{}. {}", kCorrectiveInstruction, correction_hint), {});
      }
    }
  }

 private:
  std::string send(const std::string& stage, int segment, bool corrective, const std::string& text,
                   std::span<const RgbImage* const> images) {
    std::string response;
    try {
      response = session_.send_turn(text, images);
    } catch (const TransportError& e) {
      throw PipelineError(stage, segment, "", e.what());
    }
    transcript_.push_back({stage, segment, corrective, text, images.size(), response});
    return response;
  }

  ChatSession& session_;
  std::vector<TranscriptEntry>& transcript_;
  int retry_limit_;
  int& retries_;
};

}  // namespace

PipelineResult run_pipeline(const SceneBundle& scene, const Trajectory& trajectory, const ModelTransports& transports,
                            const PipelineOptions& options) {
  if (!transports.vlm || !transports.reasoning) throw std::invalid_argument("run_pipeline: missing transport");
  throw_if_invalid(validate_scene(scene), "scene");
  throw_if_invalid(validate_trajectory(trajectory), "trajectory");
  const PromptTemplates templates =
      load_templates(options.template_dir.empty() ? default_template_dir() : options.template_dir);

  PipelineResult result;
  result.annotated = annotate_person(scene, options.annotation_style);
  result.segmentation = segment_trajectory(trajectory, options.pause_threshold_s);
  result.views = render_segment_views(result.annotated, trajectory, result.segmentation, scene.camera,
                                      options.render_style);
  const int segment_count = result.segmentation.segment_count();
  spdlog::info("segmented {} waypoints into {} segments", trajectory.size(), segment_count);

  StageOutputs& out = result.plan.source_outputs;
  ChatSession vlm(options.vlm_model, transports.vlm, options.temperature);
  Conversation conversation(vlm, result.transcript, options.retry_limit, result.retries);

  const Prompt env_prompt = build_environment_prompt(
      templates, result.annotated, scene.wrist_image ? &*scene.wrist_image : nullptr, trajectory.at(1).gripper_closed);
  conversation.exchange("environment", 0, env_prompt, "Please describe what is currently in the environment.",
                        [&](const std::string& response) {
                          out.environment_summary = trim(response);
                          if (out.environment_summary.empty()) throw ParseError("empty environment response");
                          out.held_object_description = find_section(response, "Object in Gripper");
                        });

  for (int k = 1; k <= segment_count; ++k) {
    const IndexRange range = result.segmentation.ranges[static_cast<std::size_t>(k - 1)];
    result.reports.push_back(render_kinematic_report(trajectory, range, scene.landmarks, k));
    const bool is_last = k == segment_count;
    const Prompt prompt =
        build_segment_prompt(templates, k, result.reports.back(), result.views[static_cast<std::size_t>(k - 1)], is_last);
    const std::string hint = is_last ? "Include the \"## Segment description\" and \"## Overall intention\" headings."
                                     : "Include the \"## Segment description\" heading.";
    conversation.exchange("segment", k, prompt, hint, [&](const std::string& response) {
      std::string description = extract_section(response, "Segment description");
      std::string intention = is_last ? extract_section(response, "Overall intention") : std::string();
      if (is_last) {
        out.overall_intention = std::move(intention);
        const auto cooperation = find_section(response, "User cooperation");
        out.user_cooperation = parse_cooperation(cooperation.value_or(""), segment_count);
      }
      out.segment_descriptions.push_back(std::move(description));
    });
  }

  ChatSession reasoning(options.reasoning_model, transports.reasoning, options.temperature);
  Conversation generation(reasoning, result.transcript, options.retry_limit, result.retries);
  const Prompt gen_prompt{build_generation_prompt(templates, out), {}};
  generation.exchange("generation", 0, gen_prompt,
                      fmt::format("Output exactly {} lines of the form \"Statement x: <your sentence>\", x = 1..{}.",
                                  segment_count, segment_count),
                      [&](const std::string& response) {
                        result.plan.statements = parse_statements(response, segment_count);
                      });
  result.plan.overall_intention = out.overall_intention;
  return result;
}

nlohmann::json plan_to_json(const CommunicationPlan& plan) {
  const auto& s = plan.source_outputs;
  nlohmann::json j{{"statements", plan.statements},
                   {"overall_intention", plan.overall_intention},
                   {"environment_summary", s.environment_summary},
                   {"segment_descriptions", s.segment_descriptions},
                   {"user_cooperation", s.user_cooperation}};
  j["held_object_description"] = s.held_object_description ? nlohmann::json(*s.held_object_description) : nlohmann::json();
  return j;
}

nlohmann::json transcript_to_json(const std::vector<TranscriptEntry>& transcript) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& t : transcript) {
    list.push_back({{"stage", t.stage},
                    {"segment", t.segment_index},
                    {"corrective", t.corrective},
                    {"images", t.image_count},
                    {"prompt", t.prompt},
                    {"response", t.response}});
  }
  return list;
}

}  // namespace cori

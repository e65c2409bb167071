#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "cori/config.hpp"
#include "cori/evaluation.hpp"
#include "cori/json_io.hpp"
#include "cori/narration_scheduler.hpp"
#include "cori/prompt_pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string scene;
  std::string trajectory;
  std::string out;
  std::string mock_transcript;
  std::string config;
  std::string ground_truth;
  std::string scorer_url;
  double stub_score = -1.0;
  bool verbose = false;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

cori::RunConfig resolve_config(const Flags& f) {
  cori::RunConfig c;
  if (!f.config.empty()) c = cori::load_run_config(f.config);
  if (!f.scene.empty()) c.scene_path = f.scene;
  if (!f.trajectory.empty()) c.trajectory_path = f.trajectory;
  if (!f.out.empty()) c.out_dir = f.out;
  if (!f.mock_transcript.empty()) c.mock_transcript = fs::path(f.mock_transcript);
  if (!f.ground_truth.empty()) c.ground_truth_dir = f.ground_truth;
  if (!f.scorer_url.empty()) c.scorer_url = f.scorer_url;
  return c;
}

nlohmann::json segmentation_json(const cori::SegmentationResult& seg) {
  nlohmann::json boundaries = nlohmann::json::array();
  for (std::size_t i = 0; i < seg.boundaries.size(); ++i) {
    nlohmann::json reasons = nlohmann::json::array();
    for (auto r : seg.reasons[i]) reasons.push_back(std::string(cori::to_string(r)));
    boundaries.push_back({{"index", seg.boundaries[i]}, {"reasons", reasons}});
  }
  nlohmann::json ranges = nlohmann::json::array();
  for (const auto& r : seg.ranges) ranges.push_back({r.first, r.last});
  return {{"boundaries", boundaries}, {"ranges", ranges}};
}

void write_images(const fs::path& out, const cori::SceneBundle& scene, const cori::AnnotatedScene& annotated,
                  const std::vector<cori::RenderedSegmentView>& views) {
  std::string stem = fs::path(scene.environment_image_path).stem().string();
  if (stem.empty()) stem = "scene";
  cori::write_png(annotated.annotated_image, out / (stem + "_annotated.png"));
  for (const auto& v : views) {
    cori::write_png(v.full_image, out / fmt::format("seg{}_full.png", v.segment_index));
    cori::write_png(v.crop_image, out / fmt::format("seg{}_crop.png", v.segment_index));
  }
  write_text(out / "render_manifest.json", cori::render_manifest(views).dump(2) + "\n");
}

int cmd_segment(const Flags& f) {
  const auto c = resolve_config(f);
  if (c.trajectory_path.empty()) throw std::runtime_error("--trajectory is required");
  const auto trajectory = cori::load_trajectory(c.trajectory_path);
  const auto seg = cori::segment_trajectory(trajectory, c.pause_threshold_s);
  const std::string text = segmentation_json(seg).dump(2) + "\n";
  if (!f.out.empty() || !f.config.empty()) {
    fs::create_directories(c.out_dir);
    write_text(c.out_dir / "segmentation.json", text);
  }
  std::cout << text;
  return 0;
}

int cmd_render(const Flags& f) {
  const auto c = resolve_config(f);
  const auto [scene, trajectory] = cori::load_scene_and_trajectory(c.scene_path, c.trajectory_path);
  const auto annotated = cori::annotate_person(scene);
  const auto seg = cori::segment_trajectory(trajectory, c.pause_threshold_s);
  const auto views = cori::render_segment_views(annotated, trajectory, seg, scene.camera, c.render);
  fs::create_directories(c.out_dir);
  write_images(c.out_dir, scene, annotated, views);
  write_text(c.out_dir / "segmentation.json", segmentation_json(seg).dump(2) + "\n");
  fmt::print("rendered {} segment views into {}\n", views.size(), c.out_dir.string());
  return 0;
}

int cmd_run(const Flags& f) {
  const auto c = resolve_config(f);
  const auto [scene, trajectory] = cori::load_scene_and_trajectory(c.scene_path, c.trajectory_path);
  cori::ModelTransports transports;
  if (c.mock_transcript) {
    auto mock = cori::MockTranscriptTransport::from_file(*c.mock_transcript);
    transports = {mock, mock};
  } else {
    auto http = std::make_shared<cori::HttpTransport>(cori::transport_options(c.model));
    transports = {http, http};
  }
  const auto result = cori::run_pipeline(scene, trajectory, transports, cori::pipeline_options(c));
  const auto schedule = cori::schedule_narration(result.plan.statements, trajectory, result.segmentation,
                                                 std::nullopt, c.speech_rate_wpm);

  fs::create_directories(c.out_dir / "prompts");
  write_images(c.out_dir, scene, result.annotated, result.views);
  write_text(c.out_dir / "segmentation.json", segmentation_json(result.segmentation).dump(2) + "\n");
  for (std::size_t i = 0; i < result.transcript.size(); ++i) {
    const auto& t = result.transcript[i];
    const std::string name = fmt::format("{:02d}_{}{}{}", i + 1, t.stage,
                                         t.segment_index > 0 ? fmt::format("_{}", t.segment_index) : "",
                                         t.corrective ? "_retry" : "");
    write_text(c.out_dir / "prompts" / (name + "_prompt.txt"), t.prompt + "\n");
    write_text(c.out_dir / "prompts" / (name + "_response.txt"), t.response + "\n");
  }
  write_text(c.out_dir / "transcript.json", cori::transcript_to_json(result.transcript).dump(2) + "\n");
  auto plan = cori::plan_to_json(result.plan);
  plan["retries"] = result.retries;
  write_text(c.out_dir / "plan.json", plan.dump(2) + "\n");
  write_text(c.out_dir / "narration.json", cori::schedule_to_json(schedule).dump(2) + "\n");
  write_text(c.out_dir / "narration.srt", cori::schedule_to_srt(schedule));

  for (const auto& item : schedule) {
    fmt::print("[{:7.2f} s] Statement {}: {}\n", item.speech_start_s, item.segment_index, item.statement);
  }
  return 0;
}

int cmd_evaluate(const Flags& f) {
  auto c = resolve_config(f);
  if (c.ground_truth_dir.empty()) c.ground_truth_dir = "fixtures/ground_truth";
  const auto corpus = cori::load_ground_truth_corpus(c.ground_truth_dir);
  auto records = cori::build_records(corpus, c.pause_threshold_s);
  std::unique_ptr<cori::EntailmentScorer> scorer;
  if (f.stub_score >= 0.0) {
    scorer = std::make_unique<cori::ConstantScorer>(f.stub_score);
  } else {
    scorer = std::make_unique<cori::HttpEntailmentScorer>(c.scorer_url, c.model.timeout_s);
  }
  records = cori::score_statements(std::move(records), *scorer);
  const auto stats = cori::aggregate_scores(records);
  const std::string table = cori::statistics_to_tsv(stats);
  if (!f.out.empty() || !f.config.empty()) {
    fs::create_directories(c.out_dir);
    write_text(c.out_dir / "records.tsv", cori::records_to_tsv(records));
    write_text(c.out_dir / "summary.tsv", table);
  }
  std::cout << table;
  std::size_t flagged = 0;
  for (const auto& r : records) flagged += r.flagged ? 1 : 0;
  if (flagged > 0) {
    fmt::print(stderr, "{} record(s) could not be scored\n", flagged);
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robot intent communication pipeline"};
  app.require_subcommand(1);
  Flags f;
  app.add_flag("-v,--verbose", f.verbose, "Debug logging");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "Output directory");
  };
  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--scene", f.scene, "Scene file");
    sub->add_option("--trajectory", f.trajectory, "Trajectory file");
  };

  auto* run = app.add_subcommand("run", "Full pipeline: images, prompts, statements, narration schedule");
  add_common(run);
  add_inputs(run);
  run->add_option("--mock-transcript", f.mock_transcript, "Replay model responses from this file");

  auto* render = app.add_subcommand("render", "Annotated image and per-segment overlays only");
  add_common(render);
  add_inputs(render);

  auto* segment = app.add_subcommand("segment", "Print the segmentation of a trajectory");
  add_common(segment);
  segment->add_option("--trajectory", f.trajectory, "Trajectory file");

  auto* evaluate = app.add_subcommand("evaluate", "Entailment evaluation over the ground-truth corpus");
  add_common(evaluate);
  evaluate->add_option("--ground-truth", f.ground_truth, "Corpus root (<task>/<trajectory>/segment_k.txt)");
  evaluate->add_option("--scorer-url", f.scorer_url, "Entailment service base URL");
  evaluate->add_option("--stub-score", f.stub_score, "Score every pair with this probability instead")
      ->check(CLI::Range(0.0, 1.0));

  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("cori"));
  spdlog::set_level(f.verbose ? spdlog::level::debug : spdlog::level::info);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "run") return cmd_run(f);
    if (name == "render") return cmd_render(f);
    if (name == "segment") return cmd_segment(f);
    return cmd_evaluate(f);
  } catch (const cori::PipelineError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    if (!e.raw_response().empty()) fmt::print(stderr, "last response:\n{}\n", e.raw_response());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}: {}\n", name, e.what());
    return 1;
  }
}

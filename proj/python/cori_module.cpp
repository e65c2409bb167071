#include <fmt/format.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cori/config.hpp"
#include "cori/errors.hpp"
#include "cori/evaluation.hpp"
#include "cori/json_io.hpp"
#include "cori/narration_scheduler.hpp"
#include "cori/number_format.hpp"
#include "cori/overlay_renderer.hpp"
#include "cori/prompt_pipeline.hpp"
#include "cori/segmentation.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;

namespace {

// JSON crosses the boundary as text; the Python package wraps it in dicts.
std::string segmentation_json(const cori::SegmentationResult& seg) {
  nlohmann::json boundaries = nlohmann::json::array();
  for (std::size_t i = 0; i < seg.boundaries.size(); ++i) {
    nlohmann::json reasons = nlohmann::json::array();
    for (auto r : seg.reasons[i]) reasons.push_back(std::string(cori::to_string(r)));
    boundaries.push_back({{"index", seg.boundaries[i]}, {"reasons", reasons}});
  }
  nlohmann::json ranges = nlohmann::json::array();
  for (const auto& r : seg.ranges) ranges.push_back({r.first, r.last});
  return nlohmann::json{{"boundaries", boundaries}, {"ranges", ranges}}.dump();
}

cori::Trajectory trajectory_from_text(const std::string& text) {
  try {
    return cori::trajectory_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw cori::ParseError(e.what());
  }
}

Eigen::MatrixX2d project(const Eigen::Matrix3d& intrinsics, const Eigen::Matrix4d& extrinsics,
                         const Eigen::MatrixX3d& points) {
  cori::CameraModel camera;
  camera.intrinsics = intrinsics;
  camera.extrinsics_base_to_camera = extrinsics;
  std::vector<Eigen::Vector3d> pts;
  for (Eigen::Index i = 0; i < points.rows(); ++i) pts.emplace_back(points.row(i).transpose());
  const auto px = cori::project_points(camera, pts);
  Eigen::MatrixX2d out(points.rows(), 2);
  for (Eigen::Index i = 0; i < points.rows(); ++i) out.row(i) = px[static_cast<std::size_t>(i)].transpose();
  return out;
}

std::string render(const fs::path& scene_path, const fs::path& trajectory_path, const fs::path& out_dir) {
  const auto [scene, trajectory] = cori::load_scene_and_trajectory(scene_path, trajectory_path);
  const auto annotated = cori::annotate_person(scene);
  const auto seg = cori::segment_trajectory(trajectory);
  const auto views = cori::render_segment_views(annotated, trajectory, seg, scene.camera);
  fs::create_directories(out_dir);
  cori::write_png(annotated.annotated_image, out_dir / "annotated.png");
  for (const auto& v : views) {
    cori::write_png(v.full_image, out_dir / fmt::format("seg{}_full.png", v.segment_index));
    cori::write_png(v.crop_image, out_dir / fmt::format("seg{}_crop.png", v.segment_index));
  }
  return cori::render_manifest(views).dump();
}

std::string run_with_transcript(const fs::path& scene_path, const fs::path& trajectory_path,
                                const fs::path& transcript_path, double speech_rate_wpm) {
  const auto [scene, trajectory] = cori::load_scene_and_trajectory(scene_path, trajectory_path);
  auto mock = cori::MockTranscriptTransport::from_file(transcript_path);
  const auto result = cori::run_pipeline(scene, trajectory, {mock, mock});
  const auto schedule =
      cori::schedule_narration(result.plan.statements, trajectory, result.segmentation, std::nullopt, speech_rate_wpm);
  auto plan = cori::plan_to_json(result.plan);
  plan["retries"] = result.retries;
  plan["narration"] = cori::schedule_to_json(schedule)["items"];
  return plan.dump();
}

std::vector<std::string> baseline_statements(const fs::path& scene_path, const fs::path& trajectory_path) {
  const auto [scene, trajectory] = cori::load_scene_and_trajectory(scene_path, trajectory_path);
  const auto seg = cori::segment_trajectory(trajectory);
  std::vector<std::string> out;
  for (const auto& r : seg.ranges) out.push_back(cori::generate_baseline_statement(r, trajectory, scene.landmarks));
  return out;
}

std::string schedule(const std::vector<std::string>& statements, const std::string& trajectory_text,
                     std::optional<std::vector<double>> durations, double rate_wpm, double pause_threshold_s) {
  const auto trajectory = trajectory_from_text(trajectory_text);
  cori::throw_if_invalid(cori::validate_trajectory(trajectory), "trajectory");
  const auto seg = cori::segment_trajectory(trajectory, pause_threshold_s);
  return cori::schedule_to_json(cori::schedule_narration(statements, trajectory, seg, durations, rate_wpm)).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the cori package";

  py::register_exception<cori::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<cori::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<cori::ProjectionError>(m, "ProjectionError", PyExc_ValueError);
  py::register_exception<cori::DeidentificationError>(m, "DeidentificationError", PyExc_ValueError);
  py::register_exception<cori::TransportError>(m, "TransportError", PyExc_RuntimeError);
  py::register_exception<cori::PipelineError>(m, "PipelineError", PyExc_RuntimeError);

  m.attr("DEFAULT_PAUSE_THRESHOLD_S") = cori::kDefaultPauseThresholdS;

  m.def(
      "segment",
      [](const std::string& trajectory_text, double pause_threshold_s) {
        const auto t = trajectory_from_text(trajectory_text);
        cori::throw_if_invalid(cori::validate_trajectory(t), "trajectory");
        return segmentation_json(cori::segment_trajectory(t, pause_threshold_s));
      },
      py::arg("trajectory_json"), py::arg("pause_threshold_s") = cori::kDefaultPauseThresholdS);
  m.def(
      "validate_trajectory",
      [](const std::string& trajectory_text) {
        std::vector<std::string> messages;
        for (const auto& v : cori::validate_trajectory(trajectory_from_text(trajectory_text))) messages.push_back(v.message);
        return messages;
      },
      py::arg("trajectory_json"));
  m.def("project_points", &project, py::arg("intrinsics"), py::arg("extrinsics"), py::arg("points"));
  m.def(
      "velocity_color",
      [](double v, double lo, double hi) {
        const auto c = cori::velocity_color(v, lo, hi);
        return std::tuple<int, int, int>{c.r, c.g, c.b};
      },
      py::arg("speed_mps"), py::arg("segment_min"), py::arg("segment_max"));
  m.def(
      "force_color",
      [](double f, double lo, double hi) {
        const auto c = cori::force_color(f, lo, hi);
        return std::tuple<int, int, int>{c.r, c.g, c.b};
      },
      py::arg("force_n"), py::arg("segment_min"), py::arg("segment_max"));
  m.def("render", &render, py::arg("scene"), py::arg("trajectory"), py::arg("out_dir"));
  m.def("run_with_transcript", &run_with_transcript, py::arg("scene"), py::arg("trajectory"),
        py::arg("transcript"), py::arg("speech_rate_wpm") = cori::kDefaultSpeechRateWpm);
  m.def("baseline_statements", &baseline_statements, py::arg("scene"), py::arg("trajectory"));
  m.def("parse_statements", &cori::parse_statements, py::arg("response"), py::arg("expected_count"));
  m.def("estimate_speech_duration", &cori::estimate_speech_duration, py::arg("statement"),
        py::arg("rate_wpm") = cori::kDefaultSpeechRateWpm);
  m.def("schedule", &schedule, py::arg("statements"), py::arg("trajectory_json"), py::arg("durations_s") = py::none(),
        py::arg("rate_wpm") = cori::kDefaultSpeechRateWpm,
        py::arg("pause_threshold_s") = cori::kDefaultPauseThresholdS);
  m.def("format_mean_sd", &cori::format_mean_sd, py::arg("mean"), py::arg("sd"));
}

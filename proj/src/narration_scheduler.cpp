#include "cori/narration_scheduler.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cori {

double estimate_speech_duration(const std::string& statement, double rate_wpm) {
  if (!(rate_wpm > 0.0)) throw std::invalid_argument("speech rate must be positive");
  std::istringstream in(statement);
  std::string word;
  std::size_t words = 0;
  while (in >> word) ++words;
  return static_cast<double>(words) * 60.0 / rate_wpm;
}

std::vector<NarrationItem> schedule_narration(const std::vector<std::string>& statements,
                                              const Trajectory& trajectory,
                                              const SegmentationResult& segmentation,
                                              const std::optional<std::vector<double>>& durations_s,
                                              double rate_wpm) {
  const std::size_t n = segmentation.ranges.size();
  if (statements.size() != n) {
    throw std::invalid_argument(
        fmt::format("schedule_narration: {} statements for {} segments", statements.size(), n));
  }
  if (durations_s && durations_s->size() != n) {
    throw std::invalid_argument(
        fmt::format("schedule_narration: {} durations for {} segments", durations_s->size(), n));
  }
  std::vector<NarrationItem> items;
  if (n == 0) return items;

  const double t1 = trajectory.at(1).timestamp_s;
  const double d1 = durations_s ? (*durations_s)[0] : estimate_speech_duration(statements[0], rate_wpm);
  double previous_end = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    NarrationItem item;
    item.segment_index = static_cast<int>(i) + 1;
    item.statement = statements[i];
    item.speech_duration_s = durations_s ? (*durations_s)[i] : estimate_speech_duration(statements[i], rate_wpm);
    if (item.speech_duration_s < 0.0) throw std::invalid_argument("speech durations must be nonnegative");
    item.motion_start_s = trajectory.at(segmentation.ranges[i].first).timestamp_s - t1 + d1;
    item.formula_speech_start_s = i == 0 ? 0.0 : item.motion_start_s - 0.5 * item.speech_duration_s;
    item.speech_start_s = item.formula_speech_start_s;
    if (i > 0 && item.speech_start_s < previous_end) {
      spdlog::warn("statement {} would start at {:.3f} s, overlapping statement {} (ends {:.3f} s); delayed",
                   item.segment_index, item.speech_start_s, item.segment_index - 1, previous_end);
      item.speech_start_s = previous_end;
      item.floored = true;
    }
    previous_end = item.speech_start_s + item.speech_duration_s;
    items.push_back(std::move(item));
  }
  return items;
}

nlohmann::json schedule_to_json(const std::vector<NarrationItem>& items) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& it : items) {
    list.push_back({{"k", it.segment_index},
                    {"statement", it.statement},
                    {"speech_start_s", it.speech_start_s},
                    {"motion_start_s", it.motion_start_s},
                    {"speech_duration_s", it.speech_duration_s}});
  }
  return {{"items", list}};
}

namespace {

std::string srt_time(double seconds) {
  const auto ms = static_cast<long long>(std::llround(seconds * 1000.0));
  return fmt::format("{:02d}:{:02d}:{:02d},{:03d}", ms / 3600000, (ms / 60000) % 60, (ms / 1000) % 60, ms % 1000);
}

}  // namespace

std::string schedule_to_srt(const std::vector<NarrationItem>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    out += fmt::format("{}\n{} --> {}\n{}\n\n", i + 1, srt_time(it.speech_start_s),
                       srt_time(it.speech_start_s + it.speech_duration_s), it.statement);
  }
  return out;
}

}  // namespace cori

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cori/core_model.hpp"
#include "cori/segmentation.hpp"
#include "json.hpp"

namespace cori {

struct NarrationItem {
  int segment_index = 0;  // 1-based
  std::string statement;
  double speech_duration_s = 0.0;
  double speech_start_s = 0.0;      // after flooring
  double motion_start_s = 0.0;
  double formula_speech_start_s = 0.0;  // before flooring
  bool floored = false;
};

inline constexpr double kDefaultSpeechRateWpm = 150.0;

/// Whitespace-separated word count * 60 / rate_wpm. Throws
/// std::invalid_argument for rate_wpm <= 0.
double estimate_speech_duration(const std::string& statement, double rate_wpm = kDefaultSpeechRateWpm);

/// Timeline origin is the first speech onset. Motion time is shifted so
/// segment 1 starts moving when statement 1 ends; statement k >= 2 starts
/// half its duration before segment k's motion, floored at the end of the
/// previous statement (logged). durations_s overrides the estimate.
std::vector<NarrationItem> schedule_narration(const std::vector<std::string>& statements,
                                              const Trajectory& trajectory,
                                              const SegmentationResult& segmentation,
                                              const std::optional<std::vector<double>>& durations_s = std::nullopt,
                                              double rate_wpm = kDefaultSpeechRateWpm);

/// {"items": [{"k", "statement", "speech_start_s", "motion_start_s", "speech_duration_s"}]}
nlohmann::json schedule_to_json(const std::vector<NarrationItem>& items);

/// SubRip cues spanning each statement's speech window.
std::string schedule_to_srt(const std::vector<NarrationItem>& items);

}  // namespace cori

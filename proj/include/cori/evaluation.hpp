#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cori/core_model.hpp"
#include "json.hpp"

namespace cori {

enum class Strategy { kCori, kBaseline, kOracleSummary };

std::string_view to_string(Strategy strategy);

struct EvaluationRecord {
  std::string task;        // bathing | shaving | feeding | other
  std::string trajectory;  // e.g. "trajectory_1"
  std::string source;      // participant id for CoRI samples, else the strategy name
  int segment_index = 0;
  std::string statement;     // hypothesis
  std::string ground_truth;  // premise
  Strategy strategy = Strategy::kCori;
  std::optional<double> entailment_probability;
  bool flagged = false;  // scorer failed after retries
  std::string error;
};

/// "I'm moving towards your {name}." for the landmark nearest the range's
/// last waypoint.
std::string generate_baseline_statement(IndexRange range, const Trajectory& trajectory,
                                        const BodyLandmarkSet& landmarks);

struct EntailmentScores {
  double entailment = 0.0;
  double neutral = 0.0;
  double contradiction = 0.0;
};

class EntailmentScorer {
 public:
  virtual ~EntailmentScorer() = default;
  /// Throws TransportError on endpoint failure.
  virtual EntailmentScores score(const std::string& premise, const std::string& hypothesis) = 0;
};

/// POST {base_url}/score with {"premise", "hypothesis"}; expects
/// {"entailment", "neutral", "contradiction"}.
class HttpEntailmentScorer : public EntailmentScorer {
 public:
  explicit HttpEntailmentScorer(std::string base_url, double timeout_s = 60.0);
  EntailmentScores score(const std::string& premise, const std::string& hypothesis) override;

 private:
  std::string base_url_;
  double timeout_s_;
};

/// Returns a fixed entailment probability for every pair.
class ConstantScorer : public EntailmentScorer {
 public:
  explicit ConstantScorer(double entailment) : entailment_(entailment) {}
  EntailmentScores score(const std::string&, const std::string&) override;

 private:
  double entailment_;
};

struct ScoringOptions {
  int max_attempts = 3;
  double initial_backoff_s = 0.5;
  std::function<void(std::chrono::duration<double>)> sleeper;  // default: sleep_for
};

/// Premise = ground truth, hypothesis = statement. Empty statements or
/// ground truths throw std::invalid_argument before any request is made.
/// Records whose scorer calls keep failing are flagged rather than thrown.
std::vector<EvaluationRecord> score_statements(std::vector<EvaluationRecord> records, EntailmentScorer& scorer,
                                               const ScoringOptions& options = {});

struct GroupStatistic {
  std::string task;
  Strategy strategy = Strategy::kCori;
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // population
  std::string formatted;
};

/// "0.95 (±0.05)".
std::string format_mean_sd(double mean, double sd);

/// Mean and population SD of scored, unflagged records per (task, strategy).
/// Throws std::invalid_argument for an empty input or a group with no usable
/// record.
std::vector<GroupStatistic> aggregate_scores(const std::vector<EvaluationRecord>& records);

std::string statistics_to_tsv(const std::vector<GroupStatistic>& stats);
std::string records_to_tsv(const std::vector<EvaluationRecord>& records);

struct TrajectoryCorpus {
  std::string task;
  std::string trajectory;
  std::filesystem::path directory;
  std::vector<std::string> ground_truths;  // segment_k.txt
  std::vector<std::string> summaries;      // summary.txt lines
  std::vector<std::pair<std::string, std::vector<std::string>>> cori_samples;  // participant -> statements
  std::optional<std::filesystem::path> scene_path;       // from inputs.json
  std::optional<std::filesystem::path> trajectory_path;  // from inputs.json
};

/// Reads <root>/<task>/<trajectory>/ directories in name order.
std::vector<TrajectoryCorpus> load_ground_truth_corpus(const std::filesystem::path& root);

/// CoRI and oracle-summary records for every trajectory, plus baseline
/// records where inputs.json names a scene and trajectory whose segment
/// count matches the ground truth.
std::vector<EvaluationRecord> build_records(const std::vector<TrajectoryCorpus>& corpus, double pause_threshold_s);

}  // namespace cori

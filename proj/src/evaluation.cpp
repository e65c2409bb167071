#include "cori/evaluation.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cori/errors.hpp"
#include "cori/json_io.hpp"
#include "cori/kinematic_text.hpp"
#include "cori/number_format.hpp"
#include "cori/prompt_pipeline.hpp"
#include "cori/segmentation.hpp"

namespace cori {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kCori:
      return "cori";
    case Strategy::kBaseline:
      return "baseline";
    case Strategy::kOracleSummary:
      return "oracle_summary";
  }
  return "unknown";
}

std::string generate_baseline_statement(IndexRange range, const Trajectory& trajectory,
                                        const BodyLandmarkSet& landmarks) {
  const auto nearest = nearest_landmark(trajectory.at(range.last).position_m, landmarks);
  return fmt::format("I'm moving towards your {}.", nearest.name);
}

HttpEntailmentScorer::HttpEntailmentScorer(std::string base_url, double timeout_s)
    : base_url_(std::move(base_url)), timeout_s_(timeout_s) {}

EntailmentScores HttpEntailmentScorer::score(const std::string& premise, const std::string& hypothesis) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(base_url_, m, url_re)) {
    throw std::invalid_argument(fmt::format("invalid scorer url '{}'", base_url_));
  }
  std::string path = m[2].matched ? m[2].str() : "";
  while (!path.empty() && path.back() == '/') path.pop_back();
  path += "/score";

  httplib::Client client(m[1].str());
  const auto timeout =
      std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::duration<double>(timeout_s_));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  const nlohmann::json body{{"premise", premise}, {"hypothesis", hypothesis}};
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) throw TransportError(fmt::format("scorer request failed: {}", httplib::to_string(res.error())));
  if (res->status != 200) throw TransportError(fmt::format("scorer returned HTTP {}", res->status), res->status);
  try {
    const auto j = nlohmann::json::parse(res->body);
    return {j.at("entailment").get<double>(), j.at("neutral").get<double>(), j.at("contradiction").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(fmt::format("malformed scorer response: {}", e.what()), res->status);
  }
}

EntailmentScores ConstantScorer::score(const std::string&, const std::string&) {
  return {entailment_, (1.0 - entailment_) / 2.0, (1.0 - entailment_) / 2.0};
}

std::vector<EvaluationRecord> score_statements(std::vector<EvaluationRecord> records, EntailmentScorer& scorer,
                                               const ScoringOptions& options) {
  for (const auto& r : records) {
    if (r.statement.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw std::invalid_argument(
          fmt::format("empty hypothesis for {}/{} segment {}", r.task, r.trajectory, r.segment_index));
    }
    if (r.ground_truth.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw std::invalid_argument(
          fmt::format("empty premise for {}/{} segment {}", r.task, r.trajectory, r.segment_index));
    }
  }
  auto sleeper = options.sleeper;
  if (!sleeper) sleeper = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); };
  const int attempts = std::max(1, options.max_attempts);
  for (auto& r : records) {
    for (int attempt = 1; attempt <= attempts; ++attempt) {
      try {
        const double p = scorer.score(r.ground_truth, r.statement).entailment;
        if (!(p >= 0.0 && p <= 1.0)) throw TransportError(fmt::format("entailment probability {} outside [0, 1]", p));
        r.entailment_probability = p;
        r.flagged = false;
        r.error.clear();
        break;
      } catch (const TransportError& e) {
        r.error = e.what();
        if (attempt == attempts) {
          r.flagged = true;
          spdlog::warn("scoring {}/{} segment {} ({}) failed: {}", r.task, r.trajectory, r.segment_index, r.source,
                       e.what());
        } else {
          sleeper(std::chrono::duration<double>(options.initial_backoff_s * std::pow(2.0, attempt - 1)));
        }
      }
    }
  }
  return records;
}

std::string format_mean_sd(double mean, double sd) {
  return fmt::format("{} (±{})", format_fixed(mean, 2), format_fixed(sd, 2));
}

std::vector<GroupStatistic> aggregate_scores(const std::vector<EvaluationRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate_scores: no records");
  std::map<std::pair<std::string, Strategy>, std::vector<double>> groups;
  for (const auto& r : records) {
    auto& values = groups[{r.task, r.strategy}];
    if (r.entailment_probability && !r.flagged) values.push_back(*r.entailment_probability);
  }
  std::vector<GroupStatistic> out;
  for (auto& [key, values] : groups) {
    if (values.empty()) {
      throw std::invalid_argument(
          fmt::format("aggregate_scores: no scored records for {} / {}", key.first, to_string(key.second)));
    }
    // Sorting makes the floating-point sums independent of record order.
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    const double sd = std::sqrt(sq / static_cast<double>(values.size()));
    out.push_back({key.first, key.second, values.size(), mean, sd, format_mean_sd(mean, sd)});
  }
  return out;
}

std::string statistics_to_tsv(const std::vector<GroupStatistic>& stats) {
  std::string out = "task\tstrategy\tn\tmean\tsd\tformatted\n";
  for (const auto& s : stats) {
    out += fmt::format("{}\t{}\t{}\t{:.6f}\t{:.6f}\t{}\n", s.task, to_string(s.strategy), s.count, s.mean, s.sd,
                       s.formatted);
  }
  return out;
}

std::string records_to_tsv(const std::vector<EvaluationRecord>& records) {
  auto clean = [](std::string s) {
    std::replace(s.begin(), s.end(), '\t', ' ');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
  };
  std::string out = "task\ttrajectory\tstrategy\tsource\tsegment\tentailment\tflagged\tstatement\n";
  for (const auto& r : records) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", r.task, r.trajectory, to_string(r.strategy), r.source,
                       r.segment_index,
                       r.entailment_probability ? fmt::format("{:.6f}", *r.entailment_probability) : "",
                       r.flagged ? "yes" : "no", clean(r.statement));
  }
  return out;
}

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

std::vector<std::filesystem::path> sorted_subdirs(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_directory()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<TrajectoryCorpus> load_ground_truth_corpus(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) throw ParseError(fmt::format("cannot open '{}'", root.string()));
  static const std::regex sample_re(R"(cori_(\w+)\.txt)");
  std::vector<TrajectoryCorpus> corpus;
  for (const auto& task_dir : sorted_subdirs(root)) {
    for (const auto& traj_dir : sorted_subdirs(task_dir)) {
      TrajectoryCorpus c;
      c.task = task_dir.filename().string();
      c.trajectory = traj_dir.filename().string();
      c.directory = traj_dir;
      for (int k = 1; std::filesystem::exists(traj_dir / fmt::format("segment_{}.txt", k)); ++k) {
        c.ground_truths.push_back(read_text(traj_dir / fmt::format("segment_{}.txt", k)));
      }
      if (c.ground_truths.empty()) {
        throw ParseError(fmt::format("'{}' has no segment_1.txt", traj_dir.string()));
      }
      const int count = static_cast<int>(c.ground_truths.size());
      if (std::filesystem::exists(traj_dir / "summary.txt")) {
        std::istringstream in(read_text(traj_dir / "summary.txt"));
        for (std::string line; std::getline(in, line);) {
          if (!line.empty()) c.summaries.push_back(line);
        }
        if (static_cast<int>(c.summaries.size()) != count) {
          throw ParseError(fmt::format("'{}': {} summaries for {} segments", (traj_dir / "summary.txt").string(),
                                       c.summaries.size(), count));
        }
      }
      std::vector<std::filesystem::path> samples;
      for (const auto& e : std::filesystem::directory_iterator(traj_dir)) {
        if (std::regex_match(e.path().filename().string(), sample_re)) samples.push_back(e.path());
      }
      std::sort(samples.begin(), samples.end());
      for (const auto& p : samples) {
        std::smatch m;
        const std::string name = p.filename().string();
        std::regex_match(name, m, sample_re);
        c.cori_samples.emplace_back(m[1].str(), parse_statements(read_text(p), count));
      }
      if (std::filesystem::exists(traj_dir / "inputs.json")) {
        const auto j = read_json_file(traj_dir / "inputs.json");
        c.scene_path = traj_dir / j.at("scene").get<std::string>();
        c.trajectory_path = traj_dir / j.at("trajectory").get<std::string>();
      }
      corpus.push_back(std::move(c));
    }
  }
  return corpus;
}

std::vector<EvaluationRecord> build_records(const std::vector<TrajectoryCorpus>& corpus, double pause_threshold_s) {
  std::vector<EvaluationRecord> records;
  auto add = [&](const TrajectoryCorpus& c, std::string source, int k, std::string statement, Strategy strategy) {
    EvaluationRecord r;
    r.task = c.task;
    r.trajectory = c.trajectory;
    r.source = std::move(source);
    r.segment_index = k;
    r.statement = std::move(statement);
    r.ground_truth = c.ground_truths[static_cast<std::size_t>(k - 1)];
    r.strategy = strategy;
    records.push_back(std::move(r));
  };
  for (const auto& c : corpus) {
    const int count = static_cast<int>(c.ground_truths.size());
    for (const auto& [participant, statements] : c.cori_samples) {
      for (int k = 1; k <= count; ++k) {
        add(c, participant, k, statements[static_cast<std::size_t>(k - 1)], Strategy::kCori);
      }
    }
    for (std::size_t i = 0; i < c.summaries.size(); ++i) {
      add(c, "oracle_summary", static_cast<int>(i) + 1, c.summaries[i], Strategy::kOracleSummary);
    }
    if (c.scene_path && c.trajectory_path) {
      const auto [scene, trajectory] = load_scene_and_trajectory(*c.scene_path, *c.trajectory_path);
      const auto seg = segment_trajectory(trajectory, pause_threshold_s);
      if (seg.segment_count() != count) {
        spdlog::warn("{}/{}: inputs give {} segments but the ground truth has {}; baseline skipped", c.task,
                     c.trajectory, seg.segment_count(), count);
        continue;
      }
      for (int k = 1; k <= count; ++k) {
        add(c, "baseline", k,
            generate_baseline_statement(seg.ranges[static_cast<std::size_t>(k - 1)], trajectory, scene.landmarks),
            Strategy::kBaseline);
      }
    }
  }
  return records;
}

}  // namespace cori

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <thread>

#include "cori/errors.hpp"
#include "cori/evaluation.hpp"
#include "cori/segmentation.hpp"
#include "support.hpp"

// After Eigen: resolv.h defines a _res macro.
#include <httplib.h>

namespace cori {
namespace {

EvaluationRecord record(std::string task, Strategy s, double p) {
  EvaluationRecord r;
  r.task = std::move(task);
  r.strategy = s;
  r.statement = "s";
  r.ground_truth = "g";
  r.entailment_probability = p;
  return r;
}

class FlakyScorer : public EntailmentScorer {
 public:
  explicit FlakyScorer(int failures) : failures_(failures) {}
  EntailmentScores score(const std::string&, const std::string&) override {
    ++calls;
    if (failures_-- > 0) throw TransportError("scorer down", 503);
    return {0.8, 0.1, 0.1};
  }
  int calls = 0;

 private:
  int failures_;
};

TEST(Baseline, BathingSegmentTwo) {
  const auto [scene, traj] = testing::load_bathing();
  const auto seg = segment_trajectory(traj);
  EXPECT_EQ(generate_baseline_statement(seg.ranges[1], traj, scene.landmarks), "I'm moving towards your left elbow.");
  EXPECT_EQ(generate_baseline_statement(seg.ranges[0], traj, scene.landmarks), "I'm moving towards your left wrist.");
}

TEST(Aggregate, FormatExamples) {
  const auto two = aggregate_scores({record("bathing", Strategy::kCori, 0.9), record("bathing", Strategy::kCori, 1.0)});
  ASSERT_EQ(two.size(), 1u);
  EXPECT_EQ(two[0].formatted, "0.95 (±0.05)");
  EXPECT_EQ(two[0].count, 2u);
  const auto one = aggregate_scores({record("feeding", Strategy::kBaseline, 0.7)});
  EXPECT_EQ(one[0].formatted, "0.70 (±0.00)");
  EXPECT_EQ(format_mean_sd(0.955, 0.0), "0.96 (±0.00)");
}

TEST(Aggregate, GroupsByTaskAndStrategy) {
  const auto stats = aggregate_scores({record("bathing", Strategy::kCori, 1.0), record("bathing", Strategy::kBaseline, 0.2),
                                       record("shaving", Strategy::kCori, 0.5)});
  EXPECT_EQ(stats.size(), 3u);
}

TEST(Aggregate, OrderInvariant) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<EvaluationRecord> records;
  for (int i = 0; i < 200; ++i) records.push_back(record(i % 2 ? "bathing" : "shaving", Strategy::kCori, u(rng)));
  const auto base = aggregate_scores(records);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(records.begin(), records.end(), rng);
    const auto again = aggregate_scores(records);
    ASSERT_EQ(again.size(), base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_EQ(again[i].mean, base[i].mean);
      EXPECT_EQ(again[i].sd, base[i].sd);
    }
  }
}

TEST(Aggregate, EmptyInputsRejected) {
  EXPECT_THROW(aggregate_scores({}), std::invalid_argument);
  auto r = record("bathing", Strategy::kCori, 0.5);
  r.flagged = true;
  EXPECT_THROW(aggregate_scores({r}), std::invalid_argument);
}

TEST(Scoring, EmptyHypothesisRejectedBeforeScoring) {
  FlakyScorer scorer(0);
  auto r = record("bathing", Strategy::kCori, 0.0);
  r.statement = "  ";
  EXPECT_THROW(score_statements({r}, scorer), std::invalid_argument);
  r.statement = "x";
  r.ground_truth = "";
  EXPECT_THROW(score_statements({r}, scorer), std::invalid_argument);
  EXPECT_EQ(scorer.calls, 0);
}

TEST(Scoring, RetriesThenFlags) {
  std::vector<double> sleeps;
  ScoringOptions o;
  o.sleeper = [&](std::chrono::duration<double> d) { sleeps.push_back(d.count()); };
  FlakyScorer recovers(2);
  auto out = score_statements({record("bathing", Strategy::kCori, 0.0)}, recovers, o);
  EXPECT_FALSE(out[0].flagged);
  EXPECT_DOUBLE_EQ(*out[0].entailment_probability, 0.8);
  EXPECT_EQ(sleeps, (std::vector<double>{0.5, 1.0}));

  FlakyScorer dead(100);
  auto r = record("bathing", Strategy::kCori, 0.0);
  r.entailment_probability.reset();
  out = score_statements({r, r}, dead, o);
  EXPECT_TRUE(out[0].flagged);
  EXPECT_TRUE(out[1].flagged);
  EXPECT_FALSE(out[0].entailment_probability.has_value());
  EXPECT_EQ(dead.calls, 6);
}

TEST(Scoring, HttpScorerLoopback) {
  httplib::Server server;
  std::string seen;
  server.Post("/score", [&](const httplib::Request& req, httplib::Response& res) {
    seen = req.body;
    res.set_content(R"({"entailment": 0.91, "neutral": 0.06, "contradiction": 0.03})", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  HttpEntailmentScorer scorer("http://127.0.0.1:" + std::to_string(port), 5.0);
  const auto s = scorer.score("The robot wipes the arm.", "I'm wiping your arm.");
  server.stop();
  thread.join();
  EXPECT_DOUBLE_EQ(s.entailment, 0.91);
  const auto body = nlohmann::json::parse(seen);
  EXPECT_EQ(body["premise"], "The robot wipes the arm.");
  EXPECT_EQ(body["hypothesis"], "I'm wiping your arm.");
}

TEST(Scoring, HttpScorerUnreachable) {
  HttpEntailmentScorer scorer("http://127.0.0.1:1", 1.0);
  EXPECT_THROW(scorer.score("a", "b"), TransportError);
}

TEST(Corpus, LoadsShippedGroundTruth) {
  const auto corpus = load_ground_truth_corpus(testing::fixture("ground_truth"));
  ASSERT_EQ(corpus.size(), 6u);
  for (const auto& c : corpus) {
    const std::size_t expected = c.task == "feeding" ? 2u : 3u;
    EXPECT_EQ(c.ground_truths.size(), expected) << c.task << "/" << c.trajectory;
    EXPECT_EQ(c.summaries.size(), expected);
    EXPECT_EQ(c.cori_samples.size(), 3u);
    for (const auto& [participant, statements] : c.cori_samples) EXPECT_EQ(statements.size(), expected) << participant;
  }
  const auto records = build_records(corpus, kDefaultPauseThresholdS);
  int baseline = 0;
  for (const auto& r : records) {
    if (r.strategy == Strategy::kBaseline) {
      ++baseline;
      EXPECT_EQ(r.task, "bathing");
    }
  }
  EXPECT_EQ(baseline, 3);
  EXPECT_THROW(load_ground_truth_corpus("/nonexistent/gt"), ParseError);
}

TEST(Corpus, ConstantScorerEndToEnd) {
  const auto corpus = load_ground_truth_corpus(testing::fixture("ground_truth"));
  ConstantScorer scorer(1.0);
  const auto stats = aggregate_scores(score_statements(build_records(corpus, kDefaultPauseThresholdS), scorer));
  for (const auto& s : stats) EXPECT_EQ(s.formatted, "1.00 (±0.00)");
  const auto tsv = statistics_to_tsv(stats);
  EXPECT_EQ(tsv.rfind("task\tstrategy\tn\tmean\tsd\tformatted\n", 0), 0u);
}

}  // namespace
}  // namespace cori

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "serum/dts.hpp"
#include "serum/error.hpp"

using namespace serum;

TEST(Dts, AssignmentPoints) {
  const Assignment one = assign_tasks(1, 3, 5);
  auto triple = one.members[0];
  std::sort(triple.begin(), triple.end());
  EXPECT_EQ(triple, (std::array<std::size_t, 3>{0, 1, 2}));

  const Assignment a = assign_tasks(400, 17, 9);
  const Assignment b = assign_tasks(400, 17, 9);
  EXPECT_EQ(a.members, b.members);
  EXPECT_THROW(assign_tasks(10, 2, 1), ValidationError);
}

TEST(Dts, AssignmentIsBalancedAndDistinct) {
  const Assignment a = assign_tasks(900, 30, 3);
  for (auto n : a.load) {
    EXPECT_GE(n, 89u);
    EXPECT_LE(n, 91u);
  }
  for (std::size_t seed = 0; seed < 20; ++seed) {
    const Assignment r = assign_tasks(137, 4 + seed, seed);
    const auto [lo, hi] = std::minmax_element(r.load.begin(), r.load.end());
    EXPECT_LE(*hi - *lo, 1u);
    for (const auto& t : r.members) {
      EXPECT_NE(t[0], t[1]);
      EXPECT_NE(t[0], t[2]);
      EXPECT_NE(t[1], t[2]);
    }
  }
}

namespace {

Task signal_task(std::vector<std::pair<std::size_t, int>> reports) {
  Task t{"t", {}, std::nullopt};
  for (auto [agent, s] : reports) t.responses.push_back({agent, s, std::nullopt});
  return t;
}

}  // namespace

TEST(Dts, ReferencePickIsFair) {
  const Task t = signal_task({{0, 1}, {1, 0}, {2, 1}});
  double ones = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) ones += pick_reference(t, 0, 0, seed);
  EXPECT_NEAR(ones / 10000.0, 0.5, 0.02);

  const Task same = signal_task({{0, 0}, {1, 1}, {2, 1}});
  for (std::uint64_t seed = 0; seed < 100; ++seed) EXPECT_EQ(pick_reference(same, 0, 0, seed), 1);
  EXPECT_THROW(pick_reference(same, 0, 7, 1), ValidationError);
}

TEST(Dts, ReferenceFromPrediction) {
  const Response with_answer{0, 1, 0.1};
  EXPECT_EQ(reference_signal(with_answer, 0, 1), 1);
  const Response only_prediction{0, std::nullopt, 1.0};
  EXPECT_EQ(reference_signal(only_prediction, 0, 1), 1);
}

namespace {

ReportTable constant_reports(std::size_t agents, std::size_t tasks, int value,
                             Elicitation e = Elicitation::signal) {
  const Assignment a = assign_tasks(tasks, agents, 1);
  ReportTable t;
  for (std::size_t i = 0; i < agents; ++i) t.agent_ids.push_back("a" + std::to_string(i));
  for (std::size_t k = 0; k < tasks; ++k) {
    Task task{"t" + std::to_string(k), {}, std::nullopt};
    for (auto i : a.members[k]) {
      Response r{i, std::nullopt, std::nullopt};
      if (e == Elicitation::signal) {
        r.signal = value;
      } else {
        r.prediction = static_cast<double>(value);
      }
      task.responses.push_back(r);
    }
    t.tasks.push_back(task);
  }
  return t;
}

DtsConfig signal_config() {
  DtsConfig c;
  c.rule = ScoringRule::one_over_prior(Prior{0.4, 0.6});
  c.elicitation = Elicitation::signal;
  c.prior_mode = PriorMode::known_prior(Prior{0.4, 0.6});
  return c;
}

}  // namespace

TEST(Dts, CollusionScoresZero) {
  for (int value : {0, 1}) {
    const ScoreTable s = dts_run(constant_reports(20, 600, value), signal_config());
    for (const auto& a : s.agents) {
      EXPECT_TRUE(a.scored);
      EXPECT_FALSE(a.informative);
      EXPECT_EQ(a.mean_score, 0.0);
    }
    for (const auto& e : s.entries) EXPECT_EQ(e.value, 0.0);
  }
}

TEST(Dts, RuleMustMatchElicitation) {
  DtsConfig c = signal_config();
  c.elicitation = Elicitation::prediction;
  EXPECT_THROW(dts_run(constant_reports(5, 100, 1), c), ValidationError);
  c = signal_config();
  c.prior_mode = PriorMode::known_prior(Prior{0.5, 0.5});
  EXPECT_THROW(dts_run(constant_reports(5, 100, 1), c), ValidationError);
}

TEST(Dts, AgentsWithoutEnoughDataAreFlagged) {
  SimConfig sim;
  sim.agents = 10;
  sim.tasks = 200;
  Simulation s = simulate(sim);
  // A newcomer who answered a single task sees almost every task from outside;
  // the regulars each sit on about 60 of them.
  s.reports.agent_ids.push_back("late");
  s.reports.tasks[0].responses[0].agent = 10;
  DtsConfig c = signal_config();
  c.min_tasks = 150;
  const ScoreTable t = dts_run(s.reports, c);
  EXPECT_TRUE(t.agents[10].scored);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_FALSE(t.agents[i].scored) << i;
  c.min_tasks = 30;
  const ScoreTable loose = dts_run(s.reports, c);
  for (const auto& a : loose.agents) EXPECT_TRUE(a.scored);
}

// Leave-one-out: an agent's own reports never move its pool estimate.
TEST(Dts, OwnReportsDoNotMoveOwnEstimate) {
  SimConfig sim;
  sim.agents = 12;
  sim.tasks = 1500;
  sim.seed = 3;
  Simulation s = simulate(sim);
  const DtsConfig c = signal_config();
  for (std::size_t i : {0u, 5u, 11u}) {
    const EstimationResult before = estimate_pool(s.reports, i, c);
    ReportTable changed = s.reports;
    for (auto& task : changed.tasks) {
      for (auto& r : task.responses) {
        if (r.agent == i) r.signal = 1 - *r.signal;
      }
    }
    const EstimationResult after = estimate_pool(changed, i, c);
    EXPECT_EQ(before.rates, after.rates);
  }
}

TEST(Dts, ScoresDoNotDependOnJobs) {
  SimConfig sim;
  sim.agents = 30;
  sim.tasks = 3000;
  sim.elicitation = Elicitation::prediction;
  const Simulation s = simulate(sim);
  DtsConfig c;
  c.prior_mode = PriorMode::one_bit(false);
  c.jobs = 1;
  const ScoreTable one = dts_run(s.reports, c);
  c.jobs = 8;
  const ScoreTable eight = dts_run(s.reports, c);
  ASSERT_EQ(one.entries.size(), eight.entries.size());
  for (std::size_t n = 0; n < one.entries.size(); ++n) {
    EXPECT_EQ(one.entries[n].value, eight.entries[n].value);
  }
}

// Homogeneous truthful pool: per-agent DTS means track the exact expected
// Brier score. The one-bit solver is used because the known-prior solver
// divides by p1 - p0 and is several times noisier at p1 = 0.6.
TEST(Dts, HomogeneousPoolTracksExpectedBrier) {
  const double expected = oracle::expected_truthful_brier(0.2, 0.3, 0.6);
  std::vector<double> shares;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimConfig sim;
    sim.agents = 50;
    sim.tasks = 20000;
    sim.elicitation = Elicitation::prediction;
    sim.rates = RateModel{RateModel::Kind::jitter, 0, 0, ErrorRates{0.2, 0.3}, 0.0, false};
    sim.seed = seed;
    const Simulation s = simulate(sim);
    DtsConfig c;
    c.seed = seed;
    c.prior_mode = PriorMode::one_bit(false);
    const ScoreTable t = dts_run(s.reports, c);
    double close = 0;
    for (const auto& a : t.agents) close += std::abs(a.mean_score - expected) <= 0.02;
    shares.push_back(close / 50.0);
  }
  std::sort(shares.begin(), shares.end());
  EXPECT_GE(shares[2], 0.9) << "median share within 0.02 of " << expected;
}

TEST(Dts, AnalyticTruthfulValueIsBrier) {
  const std::vector<AnalyticAgent> others(10, AnalyticAgent{{0.2, 0.3}, SignalStrategy::truthful()});
  const AnalyticAgent me{{0.2, 0.3}, PredictionStrategy::truthful()};
  EXPECT_NEAR(exact_expected_dts(me, others, Prior{0.4, 0.6}, ScoringRule::brier(), 0.05),
              oracle::expected_truthful_brier(0.2, 0.3, 0.6), 1e-12);
}

TEST(Dts, AnalyticDeviationsLose) {
  const Prior prior{0.4, 0.6};
  const std::vector<AnalyticAgent> others(10, AnalyticAgent{{0.2, 0.3}, SignalStrategy::truthful()});
  const auto rule = ScoringRule::one_over_prior(prior);
  const double truthful = exact_expected_dts({{0.2, 0.3}}, others, prior, rule, 0.05);
  const double always1 =
      exact_expected_dts({{0.2, 0.3}, SignalStrategy::always(1)}, others, prior, rule, 0.05);
  EXPECT_LT(always1, truthful);
  EXPECT_NEAR(truthful, oracle::expected_one_over_prior(0, 1, 0.2, 0.3), 1e-12);
}

TEST(Dts, AnalyticCollusionPaysNothing) {
  const Prior prior{0.4, 0.6};
  const std::vector<AnalyticAgent> ones(10, AnalyticAgent{{0.2, 0.3}, SignalStrategy::always(1)});
  for (const auto& s : {SignalStrategy::truthful(), SignalStrategy::flip(), SignalStrategy{0.3, 0.6}}) {
    EXPECT_EQ(exact_expected_dts({{0.2, 0.3}, s}, ones, prior, ScoringRule::one_over_prior(prior),
                                 0.05),
              0.0);
  }
}

// Against any informative pool, the analytic payoff of a randomized signal
// report equals the closed-form expected 1/Prior score.
TEST(Dts, AnalyticPayoffMatchesClosedForm) {
  const Prior prior{0.4, 0.6};
  const auto rule = ScoringRule::one_over_prior(prior);
  for (int a = 0; a <= 10; ++a) {
    for (int b = 0; b <= 10; ++b) {
      const SignalStrategy s{a / 10.0, b / 10.0};
      std::vector<AnalyticAgent> others;
      for (int j = 0; j < 6; ++j) {
        others.push_back({{0.05 * j, 0.3 - 0.04 * j}, SignalStrategy{0.1 * (j % 2), 0.9}});
      }
      const double v = exact_expected_dts({{0.25, 0.15}, s}, others, prior, rule, 0.05);
      EXPECT_NEAR(v, oracle::expected_one_over_prior(s.f0, s.f1, 0.25, 0.15), 1e-12);
    }
  }
}

TEST(Dts, ModeNames) {
  EXPECT_EQ(parse_reference_mode("random_peer"), ReferenceMode::random_peer);
  EXPECT_EQ(parse_moment_estimator(to_string(MomentEstimator::symmetric)),
            MomentEstimator::symmetric);
  EXPECT_THROW(parse_reference_mode("nearest"), ValidationError);
}

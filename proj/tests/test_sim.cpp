#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "serum/dts.hpp"
#include "serum/error.hpp"
#include "serum/random.hpp"
#include "serum/sim.hpp"

using namespace serum;

TEST(Sim, WorldPoints) {
  const World all = gen_world(Prior{0.0, 1.0}, 10, 3);
  for (int y : all.truth) EXPECT_EQ(y, 1);
  EXPECT_EQ(gen_world(Prior{0.4, 0.6}, 500, 9).truth, gen_world(Prior{0.4, 0.6}, 500, 9).truth);
  EXPECT_NE(gen_world(Prior{0.4, 0.6}, 500, 9).truth, gen_world(Prior{0.4, 0.6}, 500, 10).truth);
}

TEST(Sim, WorldFrequencyMatchesPrior) {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const World w = gen_world(Prior{0.4, 0.6}, 100000, seed);
    double ones = 0;
    for (int y : w.truth) ones += y;
    good += std::abs(ones / 100000.0 - 0.6) <= 0.01;
  }
  EXPECT_GE(good, 38);
}

namespace {

// K tasks of three agents with the given rates; assignment is fixed.
struct Grid {
  World world;
  Assignment assignment;
  SignalGrid signals;
};

Grid grid_with(const std::vector<AgentParams>& agents, std::size_t tasks, Prior prior,
               std::uint64_t seed) {
  Grid g;
  g.world = gen_world(prior, tasks, seed);
  g.assignment = assign_tasks(tasks, agents.size(), seed);
  g.signals = gen_signals(g.world, g.assignment, agents, seed);
  return g;
}

}  // namespace

TEST(Sim, PerfectSignalsEqualTruth) {
  const std::vector<AgentParams> agents(3, AgentParams{{0.0, 0.0}, 0.0});
  const Grid g = grid_with(agents, 1000, Prior{0.4, 0.6}, 1);
  for (std::size_t k = 0; k < 1000; ++k) {
    for (auto s : g.signals[k]) EXPECT_EQ(s, g.world.truth[k]);
  }
}

TEST(Sim, SignalErrorRateAndConditionalIndependence) {
  const std::vector<AgentParams> agents(3, AgentParams{{0.3, 0.2}, 0.0});
  const Grid g = grid_with(agents, 100000, Prior{0.4, 0.6}, 5);
  double n1 = 0, zero_given_1 = 0, a1 = 0, b1 = 0, ab1 = 0;
  for (std::size_t k = 0; k < g.world.truth.size(); ++k) {
    if (g.world.truth[k] != 1) continue;
    n1 += 1;
    zero_given_1 += g.signals[k][0] == 0;
    a1 += g.signals[k][0];
    b1 += g.signals[k][1];
    ab1 += g.signals[k][0] & g.signals[k][1];
  }
  EXPECT_NEAR(zero_given_1 / n1, 0.3, 0.01);
  EXPECT_NEAR(ab1 / n1 - (a1 / n1) * (b1 / n1), 0.0, 0.01);
}

TEST(Sim, PosteriorAndStrategies) {
  EXPECT_NEAR(posterior_from_signal(1, {0.3, 0.2}, Prior{0.4, 0.6}), 0.84, 1e-12);
  EXPECT_EQ(std::get<Signal>(apply_strategy(SignalStrategy::truthful(), Signal{0}, 1, 0, 0)).value,
            0);
  EXPECT_NEAR(
      std::get<Prediction>(apply_strategy(PredictionStrategy::flip(), Prediction{0.84}, 1, 0, 0))
          .value,
      0.16, 1e-12);
  EXPECT_NEAR(PredictionStrategy::shrink(0.5).apply(0.9), 0.7, 1e-12);
  EXPECT_THROW(apply_strategy(SignalStrategy::truthful(), Prediction{0.3}, 1, 0, 0),
               ValidationError);
  EXPECT_THROW(apply_strategy(PredictionStrategy::flip(), Signal{1}, 1, 0, 0), ValidationError);
}

TEST(Sim, RandomStrategyIsIndependentOfSignal) {
  const SignalStrategy coin{0.5, 0.5};
  double n[2] = {0, 0}, ones[2] = {0, 0};
  for (std::size_t k = 0; k < 100000; ++k) {
    const int s = rng::bernoulli(0.6, 3, rng::Stream::signals, k) ? 1 : 0;
    const int r = std::get<Signal>(apply_strategy(coin, Signal{s}, 3, k, 0)).value;
    n[s] += 1;
    ones[s] += r;
  }
  EXPECT_NEAR(ones[1] / n[1] - ones[0] / n[0], 0.0, 0.01);
}

TEST(Sim, ReportRatesMatchEmpiricalReports) {
  const ErrorRates e{0.25, 0.15};
  const SignalStrategy s{0.2, 0.7};
  const ErrorRates r = s.report_rates(e);
  double n1 = 0, zero1 = 0;
  for (std::size_t k = 0; k < 200000; ++k) {
    const int sig = rng::bernoulli(e.prob_one(1), 8, rng::Stream::signals, k) ? 1 : 0;
    const int rep = std::get<Signal>(apply_strategy(s, Signal{sig}, 8, k, 0)).value;
    n1 += 1;
    zero1 += rep == 0;
  }
  EXPECT_NEAR(zero1 / n1, r.e1, 0.005);
}

TEST(Sim, SampledSignalsFromPredictions) {
  EXPECT_EQ(sample_signal_from_prediction(0.0, 1, 2, 3), 0);
  EXPECT_EQ(sample_signal_from_prediction(1.0, 1, 2, 3), 1);
  EXPECT_EQ(sample_signal_from_prediction(0.7, 1, 2, 3), sample_signal_from_prediction(0.7, 1, 2, 3));
  double ones = 0;
  for (std::size_t k = 0; k < 100000; ++k) ones += sample_signal_from_prediction(0.7, 4, k, 0);
  EXPECT_NEAR(ones / 100000.0, 0.7, 0.01);
  EXPECT_THROW(sample_signal_from_prediction(1.5, 1, 2, 3), ValidationError);
}

namespace {

ReportTable prediction_table(const std::vector<double>& predictions, const std::vector<int>& truth) {
  ReportTable t;
  t.agent_ids = {"a", "b", "c"};
  for (std::size_t k = 0; k < truth.size(); ++k) {
    Task task{"t" + std::to_string(k), {}, truth[k]};
    for (std::size_t i = 0; i < 3; ++i) task.responses.push_back({i, std::nullopt, predictions[i]});
    t.tasks.push_back(task);
  }
  return t;
}

}  // namespace

TEST(Sim, TrueScoresPoints) {
  const std::vector<int> truth{1, 0, 1, 1};
  ReportTable t = prediction_table({1.0, 0.5, 0.5}, truth);
  // Agent a predicts the truth perfectly on every task.
  for (std::size_t k = 0; k < truth.size(); ++k) t.tasks[k].responses[0].prediction = truth[k];
  const ScoreTable s = true_scores(t, ScoringRule::brier(), Elicitation::prediction);
  EXPECT_DOUBLE_EQ(s.agents[0].mean_score, 1.0);
  EXPECT_DOUBLE_EQ(s.agents[1].mean_score, 0.75);
  t.tasks[2].truth.reset();
  EXPECT_THROW(true_scores(t, ScoringRule::brier(), Elicitation::prediction), ValidationError);
}

TEST(Sim, TruthfulBrierMatchesEnumeration) {
  SimConfig cfg;
  cfg.agents = 3;
  cfg.tasks = 50000;
  cfg.elicitation = Elicitation::prediction;
  cfg.rates = RateModel{RateModel::Kind::jitter, 0, 0, ErrorRates{0.2, 0.3}, 0.0, false};
  cfg.seed = 12;
  const Simulation sim = simulate(cfg);
  const ScoreTable s = true_scores(sim.reports, ScoringRule::brier(), Elicitation::prediction);
  const double expected = oracle::expected_truthful_brier(0.2, 0.3, 0.6);
  for (const auto& a : s.agents) EXPECT_NEAR(a.mean_score, expected, 0.01);
}

TEST(Sim, SimulationShapeAndDeterminism) {
  SimConfig cfg;
  cfg.agents = 10;
  cfg.tasks = 300;
  cfg.seed = 4;
  const Simulation a = simulate(cfg);
  const Simulation b = simulate(cfg);
  ASSERT_EQ(a.reports.tasks.size(), 300u);
  for (std::size_t k = 0; k < 300; ++k) {
    ASSERT_EQ(a.reports.tasks[k].responses.size(), 3u);
    EXPECT_EQ(a.reports.tasks[k].truth, b.reports.tasks[k].truth);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(a.reports.tasks[k].responses[j].signal, b.reports.tasks[k].responses[j].signal);
    }
  }
  EXPECT_EQ(a.reports.agent_ids.front(), "a000");
  EXPECT_EQ(a.reports.tasks.front().id, "t00000");
}

TEST(Sim, BehaviourFractionAppliesToLeadingAgents) {
  SimConfig cfg;
  cfg.agents = 10;
  cfg.tasks = 200;
  cfg.behaviour = parse_behaviour("always-1");
  cfg.behaviour_fraction = 0.3;
  const Simulation sim = simulate(cfg);
  for (const auto& task : sim.reports.tasks) {
    for (const auto& r : task.responses) {
      if (r.agent < 3) EXPECT_EQ(*r.signal, 1);
    }
  }
  EXPECT_EQ(sim.behaviours[2].name, "always-1");
  EXPECT_EQ(sim.behaviours[3].name, "truthful");
}

TEST(Sim, BehaviourNames) {
  EXPECT_EQ(parse_behaviour("flip").signal, SignalStrategy::flip());
  EXPECT_EQ(parse_behaviour("always-0").signal, SignalStrategy::always(0));
  EXPECT_NEAR(parse_behaviour("shrink:0.25").prediction.param, 0.25, 0);
  EXPECT_THROW(parse_behaviour("shrink:2"), ValidationError);
  EXPECT_THROW(parse_behaviour("lazy"), ValidationError);
}

TEST(Sim, RateModels) {
  const auto uniform = draw_agents(RateModel{}, 200, 0.0, 1);
  for (const auto& a : uniform) {
    EXPECT_GE(a.rates.e1, 0.05);
    EXPECT_LE(a.rates.e1, 0.45);
  }
  RateModel bad{RateModel::Kind::uniform, 0.4, 0.7, {}, 0.0, false};
  EXPECT_THROW(draw_agents(bad, 200, 0.0, 1), ValidationError);
  bad.allow_negative_informative = true;
  EXPECT_NO_THROW(draw_agents(bad, 200, 0.0, 1));
}

TEST(Sim, JitterStaysInsideUnitAndBelowCeiling) {
  const AgentParams p{{0.45, 0.45}, 0.1};
  for (std::size_t k = 0; k < 5000; ++k) {
    const ErrorRates e = effective_rates(p, 3, k, 1);
    EXPECT_GE(e.e1, 0.0);
    EXPECT_LE(e.e1 + e.e0, 0.99 + 1e-12);
  }
}

TEST(Sim, PoolRatesExcludeTheAgent) {
  const std::vector<AgentParams> agents{{{0.1, 0.2}, 0}, {{0.3, 0.4}, 0}, {{0.5, 0.0}, 0}};
  const ErrorRates r = pool_rates_excluding(agents, 0);
  EXPECT_NEAR(r.e1, 0.4, 1e-15);
  EXPECT_NEAR(r.e0, 0.2, 1e-15);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gen.hpp"
#include "oracles.hpp"
#include "serum/bench.hpp"
#include "serum/error.hpp"

using namespace serum;

TEST(Bench, MsePoints) {
  EXPECT_EQ(mse({1, 2, 3}, {1, 2, 3}).mse, 0.0);
  EXPECT_NEAR(mse({0.1, 0.1}, {0.0, 0.0}).mse, 0.01, 1e-15);
  EXPECT_NEAR(mse({1.0, 0.0}, {0.9, 0.3}).mse, 0.05, 1e-15);
  EXPECT_THROW(mse({1.0}, {1.0, 2.0}), ValidationError);
  EXPECT_THROW(mse({}, {}), ValidationError);
}

TEST(Bench, BootstrapIntervalBracketsAndRepeats) {
  testkit::Gen g(4);
  std::vector<double> a(40), b(40);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = g.unit(), b[i] = g.unit();
  const MseResult r = mse(a, b, 500, 9);
  EXPECT_LE(r.ci_low, r.mse);
  EXPECT_GE(r.ci_high, r.mse);
  EXPECT_LT(r.ci_low, r.ci_high);
  const MseResult again = mse(a, b, 500, 9);
  EXPECT_EQ(r.ci_low, again.ci_low);
  EXPECT_EQ(r.ci_high, again.ci_high);
}

TEST(Bench, RankCorrelationPoints) {
  EXPECT_DOUBLE_EQ(*rank_correlation({1, 2, 3}, {10, 20, 30}), 1.0);
  EXPECT_DOUBLE_EQ(*rank_correlation({1, 2, 3}, {3, 2, 1}), -1.0);
  EXPECT_DOUBLE_EQ(*rank_correlation({1, 3, 2}, {1, 2, 3}), 0.5);
  EXPECT_FALSE(rank_correlation({1, 1, 1}, {1, 2, 3}));
  EXPECT_THROW(rank_correlation({1}, {1}), ValidationError);
  EXPECT_EQ(average_ranks({5, 1, 5, 3}), (std::vector<double>{3.5, 1, 3.5, 2}));
}

TEST(Bench, RankCorrelationMatchesClosedFormWithoutTies) {
  testkit::Gen g(12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + g.below(40);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = g.unit(), b[i] = g.unit();
    EXPECT_NEAR(*rank_correlation(a, b), oracle::spearman_no_ties(a, b), 1e-12);
  }
}

TEST(Bench, QuantilesInterpolate) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_NEAR(quantile({0, 10}, 0.25), 2.5, 1e-15);
}

namespace {

ReportTable answers(const std::vector<std::vector<int>>& tasks) {
  ReportTable t;
  for (const auto& task : tasks) {
    Task out{"t" + std::to_string(t.tasks.size()), {}, std::nullopt};
    for (std::size_t i = 0; i < task.size(); ++i) {
      if (t.agent_ids.size() <= i) t.agent_ids.push_back("a" + std::to_string(i));
      out.responses.push_back({i, task[i], std::nullopt});
    }
    t.tasks.push_back(out);
  }
  return t;
}

}  // namespace

TEST(Bench, PeerAgreementPoints) {
  for (auto mode : {ReferenceMode::random_peer, ReferenceMode::average_peers}) {
    for (double v : pts_baseline(answers({{1, 1, 1}, {1, 1, 1}}), 1, mode)) EXPECT_EQ(v, 1.0);
    for (double v : pts_baseline(answers({{1, 1}, {0, 0}}), 1, mode)) EXPECT_EQ(v, 2.0);
  }
  // a = 1 agrees once out of two peers, ones have frequency 2/3.
  const auto avg = pts_baseline(answers({{1, 1, 0}}), 1, ReferenceMode::average_peers);
  EXPECT_NEAR(avg[0], 0.5 * 1.5, 1e-15);
  EXPECT_NEAR(avg[2], 0.0, 1e-15);
}

TEST(Bench, SmallSweepShrinks) {
  SweepOptions o;
  o.tasks = {500, 8000};
  o.agents = {20};
  o.seeds = 8;
  const auto cells = run_consistency_sweep(o);
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_GT(cells[0].one_bit_median, cells[1].one_bit_median);
  EXPECT_GT(cells[0].known_median, cells[1].known_median);
  EXPECT_LE(cells[1].one_bit_q1, cells[1].one_bit_median);
  EXPECT_LE(cells[1].one_bit_median, cells[1].one_bit_q3);
  o.jobs = 1;
  const auto serial = run_consistency_sweep(o);
  EXPECT_EQ(serial[1].one_bit_median, cells[1].one_bit_median);
}

TEST(Bench, ExactMomentsRecoverPoolRates) {
  const auto agents = draw_agents(RateModel{}, 30, 0.0, 5);
  EXPECT_LT(exact_moment_error(agents, Prior{0.4, 0.6}), 1e-9);
  EXPECT_LT(exact_moment_error(agents, Prior{0.7, 0.3}), 1e-9);
}

TEST(Bench, SamplingWithoutReplacementBiasFades) {
  const ErrorRates mean{0.2, 0.3};
  const Prior prior{0.4, 0.6};
  const auto b5 = without_replacement_bias(5, mean, 0.1, prior);
  const auto b10 = without_replacement_bias(10, mean, 0.1, prior);
  const auto b200 = without_replacement_bias(200, mean, 0.1, prior);
  EXPECT_GT(b5.rates, b10.rates);
  EXPECT_GE(b10.moments, 10.0 * b200.moments);
  EXPECT_GE(b10.rates, 10.0 * b200.rates);
  EXPECT_GE(b5.rates, 10.0 * b200.rates);
  EXPECT_NEAR(without_replacement_bias(50, mean, 0.0, prior).rates, 0.0, 1e-12);
}

TEST(Bench, DominanceGrid) {
  const auto rows = run_dominance_grid(DominanceOptions{});
  std::size_t violations = 0, strict = 0, weak = 0;
  for (const auto& r : rows) {
    violations += r.verdict == Verdict::violation;
    strict += r.verdict == Verdict::strict;
    weak += r.verdict == Verdict::weak_zero;
    if (r.profile == "all f0=0.00 f1=1.00" && r.deviation == "flip") {
      EXPECT_EQ(r.verdict, Verdict::strict) << r.rule << " " << r.agent;
    }
    if (r.profile == "all f0=1.00 f1=1.00") {
      EXPECT_EQ(r.verdict, Verdict::weak_zero) << r.rule << " " << r.deviation;
    }
  }
  EXPECT_EQ(violations, 0u);
  EXPECT_GT(strict, 0u);
  EXPECT_GT(weak, 0u);
  EXPECT_EQ(violations + strict + weak, rows.size());
}

TEST(Bench, FidelitySmallRun) {
  FidelityOptions o;
  o.agents = 12;
  o.tasks = 3000;
  o.seeds = 3;
  o.bootstrap = 50;
  o.simulation.elicitation = Elicitation::prediction;
  o.dts.prior_mode = PriorMode::one_bit(false);
  const FidelityReport r = run_fidelity(o);
  ASSERT_EQ(r.seeds.size(), 3u);
  EXPECT_EQ(r.first_seed.size(), 12u);
  EXPECT_GT(r.median_dts_rank, 0.0);
  EXPECT_GE(r.median_within, r.min_within);

  std::istringstream plot(fidelity_plot_csv(r));
  std::string header;
  std::getline(plot, header);
  EXPECT_EQ(header, "rank,agent_id,true_score,dts_score,pts_score");
  EXPECT_TRUE(fidelity_json(r).contains("median_dts_rank"));
}

// Scores written to CSV and read back give the same per-agent means.
TEST(Bench, ScoresSurviveCsv) {
  SimConfig sim;
  sim.agents = 10;
  sim.tasks = 1000;
  const Simulation s = simulate(sim);
  DtsConfig c;
  c.rule = ScoringRule::one_over_prior(sim.prior);
  c.elicitation = Elicitation::signal;
  c.prior_mode = PriorMode::known_prior(sim.prior);
  const ScoreTable t = dts_run(s.reports, c);
  std::istringstream in(scores_csv(t));
  const auto rows = parse_scores_csv(in);
  ASSERT_EQ(rows.size(), t.agents.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].agent_id, t.agents[i].id);
    EXPECT_NEAR(rows[i].mean_score, t.agents[i].mean_score,
                1e-9 * (1.0 + std::abs(t.agents[i].mean_score)));
  }

  const auto path = std::filesystem::temp_directory_path() / "serum_bench_rt" / "r.csv";
  write_reports(path, flatten_reports(s.reports));
  const ReportTable back = index_reports(load_reports(path));
  // The file lists agents in order of first appearance, so compare by id.
  const auto a = pts_baseline(s.reports, 1), b = pts_baseline(back, 1);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto j = std::find(back.agent_ids.begin(), back.agent_ids.end(), s.reports.agent_ids[i]) -
                   back.agent_ids.begin();
    EXPECT_EQ(a[i], b[j]) << s.reports.agent_ids[i];
  }
  std::filesystem::remove_all(path.parent_path());
}

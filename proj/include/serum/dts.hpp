#pragma once

// The uniform Dominant Truth Serum. For every agent i the mechanism
//   1. estimates the reference pool's error rates from tasks answered by
//      agents other than i (matching moments, leave-one-out),
//   2. scores i zero on every task if that pool looks uninformative, and
//   3. otherwise scores each of i's reports with the surrogate rule
//      against a peer's answer on the same task.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "serum/assignment.hpp"
#include "serum/moments.hpp"
#include "serum/score_table.hpp"
#include "serum/scoring.hpp"
#include "serum/sim.hpp"
#include "serum/types.hpp"

namespace serum {

/// Random triples of distinct agents, deterministic in `seed`. Agents are
/// dealt from reshuffled decks, so loads differ by at most one.
/// Throws ValidationError with fewer than 3 agents or no tasks.
Assignment assign_tasks(std::size_t tasks, std::size_t agents, std::uint64_t seed);

/// How the reference is formed from the peers on a task.
enum class ReferenceMode {
  random_peer,    // one uniformly drawn peer per (agent, task)
  average_peers,  // mean surrogate score over every peer's reference
};

enum class MomentEstimator { positional, symmetric };

const char* to_string(ReferenceMode m);
const char* to_string(MomentEstimator m);
ReferenceMode parse_reference_mode(const std::string& s);
MomentEstimator parse_moment_estimator(const std::string& s);

/// What the mechanism knows about the prior: the prior itself, or only
/// whether Pr[y = 0] > 0.5.
struct PriorMode {
  bool known = true;
  Prior prior{0.4, 0.6};
  bool p0_majority = false;

  static PriorMode known_prior(const Prior& p) { return PriorMode{true, p, p.p0 > 0.5}; }
  static PriorMode one_bit(bool p0_majority) { return PriorMode{false, Prior{}, p0_majority}; }
};

struct DtsConfig {
  ScoringRule rule = ScoringRule::brier();
  Elicitation elicitation = Elicitation::prediction;
  PriorMode prior_mode;
  SolverOptions solver;  // solver.kappa is the informativeness threshold
  std::size_t min_tasks = kDefaultMinTasks;
  std::uint64_t seed = 1;
  ReferenceMode reference = ReferenceMode::average_peers;
  MomentEstimator estimator = MomentEstimator::symmetric;
  unsigned jobs = 0;  // 0 = all cores; results do not depend on it
};

/// Binary reference carried by a response: the recorded answer if present,
/// else a Bernoulli sample from its prediction keyed by (seed, task, agent).
int reference_signal(const Response& r, std::size_t task, std::uint64_t seed);

/// Reference for `agent` on task `task_index`: one of the other responders'
/// binary references, drawn uniformly with the counter keyed by
/// (seed, task, agent). Throws ValidationError if the agent did not answer
/// the task or has no peer on it.
int pick_reference(const Task& task, std::size_t task_index, std::size_t agent,
                   std::uint64_t seed);

/// Ordered triples of binary references from tasks with at least three
/// responders other than `agent`. Responder order is shuffled per task with
/// the run seed before the first three are taken.
std::vector<Triple> leave_one_out_triples(const ReportTable& reports, std::size_t agent,
                                          std::uint64_t seed);

/// Leave-one-out pool estimate for `agent`. Throws ValidationError when
/// fewer than config.min_tasks tasks are available.
EstimationResult estimate_pool(const ReportTable& reports, std::size_t agent,
                               const DtsConfig& config);

/// Runs the mechanism over every agent. Never throws on data-driven
/// degeneracy: degenerate pools score zero, agents without enough
/// leave-one-out data are flagged unscored.
ScoreTable dts_run(const ReportTable& reports, const DtsConfig& config);

/// An agent in the analytic engine: its signal channel and its strategy.
struct AnalyticAgent {
  ErrorRates rates;
  Strategy strategy = SignalStrategy::truthful();
};

/// Rates of the reference drawn uniformly from `others`: reported answers
/// for signal strategies, Bernoulli samples of reported predictions for
/// prediction strategies.
ErrorRates analytic_pool_rates(std::span<const AnalyticAgent> others, const Prior& prior);

/// Exact expected surrogate score of `agent` when the reference follows
/// `pool` and the mechanism plugs in `estimated` rates. Zero when
/// `estimated` fails the kappa test.
double expected_dts_given_rates(const AnalyticAgent& agent, const ErrorRates& pool,
                                const ErrorRates& estimated, const Prior& prior,
                                const ScoringRule& rule, double kappa);

/// Exact expected DTS score in the large-sample limit, where the estimate
/// equals the pool's true rates.
double exact_expected_dts(const AnalyticAgent& agent, std::span<const AnalyticAgent> others,
                          const Prior& prior, const ScoringRule& rule, double kappa);

}  // namespace serum

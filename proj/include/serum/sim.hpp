#pragma once

// Seeded synthetic world: ground truths, conditionally independent agent
// signals, posterior formation, reporting strategies and true scores.

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "serum/assignment.hpp"
#include "serum/score_table.hpp"
#include "serum/scoring.hpp"
#include "serum/types.hpp"

namespace serum {

struct AgentParams {
  ErrorRates rates;
  double task_jitter = 0.0;  // per-task uniform perturbation of the rates
};

/// Randomized signal report: Pr[report 1 | signal 0] = f0, Pr[report 1 | signal 1] = f1.
struct SignalStrategy {
  double f0 = 0.0;
  double f1 = 1.0;

  static SignalStrategy truthful() { return {0.0, 1.0}; }
  static SignalStrategy flip() { return {1.0, 0.0}; }
  static SignalStrategy always(int value) { return {double(value), double(value)}; }

  double prob_one(int signal) const { return signal == 1 ? f1 : f0; }
  /// Error rates of the reports of an agent whose signals have rates e.
  ErrorRates report_rates(const ErrorRates& e) const;

  friend bool operator==(const SignalStrategy&, const SignalStrategy&) = default;
};

enum class PredictionTag { truthful, flip, constant, shrink };

struct PredictionStrategy {
  PredictionTag tag = PredictionTag::truthful;
  double param = 0.0;  // constant value, or shrink weight lambda toward 0.5

  static PredictionStrategy truthful() { return {}; }
  static PredictionStrategy flip() { return {PredictionTag::flip, 0.0}; }
  static PredictionStrategy constant(double c) { return {PredictionTag::constant, c}; }
  static PredictionStrategy shrink(double lambda) { return {PredictionTag::shrink, lambda}; }

  double apply(double posterior) const;
  bool is_truthful() const { return tag == PredictionTag::truthful; }
};

using Strategy = std::variant<SignalStrategy, PredictionStrategy>;

/// A named behaviour used by simulation profiles: how an agent reports its
/// binary answer and, under prediction elicitation, its prediction.
struct Behaviour {
  std::string name = "truthful";
  SignalStrategy signal = SignalStrategy::truthful();
  PredictionStrategy prediction = PredictionStrategy::truthful();
};

/// truthful | flip | always-0 | always-1 | random | shrink:<lambda>
Behaviour parse_behaviour(const std::string& name);

struct World {
  std::vector<int> truth;
  Prior prior;
  std::uint64_t seed = 0;
};

World gen_world(const Prior& prior, std::size_t tasks, std::uint64_t seed);

/// Raw signals aligned with assignment.members: signals[k][slot].
using SignalGrid = std::vector<std::array<std::uint8_t, 3>>;

SignalGrid gen_signals(const World& world, const Assignment& assignment,
                       const std::vector<AgentParams>& agents, std::uint64_t seed);

/// Error rates agent `agent` uses on task `task` once per-task jitter is applied.
ErrorRates effective_rates(const AgentParams& params, std::uint64_t seed, std::size_t task,
                           std::size_t agent);

/// Signal strategies draw Bernoulli(f_s) with the counter keyed by
/// (seed, task, agent); prediction strategies are deterministic.
/// Throws ValidationError when strategy and information types differ.
Report apply_strategy(const Strategy& strategy, const Report& info, std::uint64_t seed,
                      std::size_t task, std::size_t agent);

/// Bernoulli(p) keyed by (seed, task, agent).
int sample_signal_from_prediction(double p, std::uint64_t seed, std::size_t task,
                                  std::size_t agent);

/// Per-(agent, task) score(rule, report, y) and per-agent means.
/// Throws ValidationError if any reported task lacks a truth.
ScoreTable true_scores(const ReportTable& reports, const ScoringRule& rule,
                       Elicitation elicitation);

struct RateModel {
  enum class Kind { uniform, jitter } kind = Kind::uniform;
  double low = 0.05;    // uniform: each rate ~ U[low, high]
  double high = 0.45;
  ErrorRates mean{0.2, 0.3};  // jitter: rate ~ mean + U[-spread, spread]
  double spread = 0.1;
  bool allow_negative_informative = false;
};

std::vector<AgentParams> draw_agents(const RateModel& model, std::size_t count,
                                     double task_jitter, std::uint64_t seed);

struct SimConfig {
  std::size_t agents = 50;
  std::size_t tasks = 2000;
  Prior prior{0.4, 0.6};
  Elicitation elicitation = Elicitation::signal;
  RateModel rates;
  double task_jitter = 0.0;
  Behaviour behaviour;                 // applied to the first ceil(fraction * N) agents
  double behaviour_fraction = 1.0;
  bool answers_with_predictions = true;  // prediction mode also records the binary answer
  std::uint64_t seed = 1;
};

struct Simulation {
  World world;
  Assignment assignment;
  std::vector<AgentParams> agents;
  std::vector<Behaviour> behaviours;
  ReportTable reports;  // truths attached
};

Simulation simulate(const SimConfig& config);

/// Reference-pool rates seen by agent i when everyone reports truthfully:
/// the mean of the other agents' signal rates.
ErrorRates pool_rates_excluding(const std::vector<AgentParams>& agents, std::size_t i);

std::string agent_label(std::size_t index, std::size_t count);
std::string task_label(std::size_t index, std::size_t count);

}  // namespace serum

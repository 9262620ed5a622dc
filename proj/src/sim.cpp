#include "serum/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "serum/dts.hpp"
#include "serum/error.hpp"
#include "serum/random.hpp"

namespace serum {

ErrorRates SignalStrategy::report_rates(const ErrorRates& e) const {
  const double one_given_1 = (1.0 - e.e1) * f1 + e.e1 * f0;
  const double one_given_0 = e.e0 * f1 + (1.0 - e.e0) * f0;
  return ErrorRates{1.0 - one_given_1, one_given_0};
}

double PredictionStrategy::apply(double posterior) const {
  switch (tag) {
    case PredictionTag::truthful: return posterior;
    case PredictionTag::flip: return 1.0 - posterior;
    case PredictionTag::constant: return param;
    case PredictionTag::shrink: return (1.0 - param) * posterior + param * 0.5;
  }
  return posterior;
}

Behaviour parse_behaviour(const std::string& name) {
  Behaviour b;
  b.name = name;
  if (name == "truthful") return b;
  if (name == "flip") {
    b.signal = SignalStrategy::flip();
    b.prediction = PredictionStrategy::flip();
    return b;
  }
  if (name == "always-0" || name == "always-1") {
    const int v = name.back() - '0';
    b.signal = SignalStrategy::always(v);
    b.prediction = PredictionStrategy::constant(v);
    return b;
  }
  if (name == "random") {
    b.signal = SignalStrategy{0.5, 0.5};
    b.prediction = PredictionStrategy::constant(0.5);
    return b;
  }
  if (name.rfind("shrink:", 0) == 0) {
    double lambda = -1.0;
    if (std::sscanf(name.c_str() + 7, "%lf", &lambda) != 1 || !(lambda >= 0.0 && lambda <= 1.0)) {
      throw ValidationError("shrink strategy needs a weight in [0, 1], e.g. shrink:0.5");
    }
    b.prediction = PredictionStrategy::shrink(lambda);
    return b;
  }
  throw ValidationError("unknown strategy '" + name +
                        "' (expected truthful|flip|always-0|always-1|random|shrink:<w>)");
}

World gen_world(const Prior& prior, std::size_t tasks, std::uint64_t seed) {
  World w;
  w.prior = prior;
  w.seed = seed;
  w.truth.resize(tasks);
  for (std::size_t k = 0; k < tasks; ++k) {
    w.truth[k] = rng::bernoulli(prior.p1, seed, rng::Stream::world, k) ? 1 : 0;
  }
  return w;
}

ErrorRates effective_rates(const AgentParams& params, std::uint64_t seed, std::size_t task,
                           std::size_t agent) {
  if (params.task_jitter <= 0.0) return params.rates;
  const double j = params.task_jitter;
  const double d1 = (2.0 * rng::uniform(seed, rng::Stream::jitter, task, agent, 1) - 1.0) * j;
  const double d0 = (2.0 * rng::uniform(seed, rng::Stream::jitter, task, agent, 0) - 1.0) * j;
  double e1 = std::clamp(params.rates.e1 + d1, 0.0, 1.0);
  double e0 = std::clamp(params.rates.e0 + d0, 0.0, 1.0);
  constexpr double kCeiling = 0.99;
  if (params.rates.e1 + params.rates.e0 < 1.0 && e1 + e0 > kCeiling) {
    const double scale = kCeiling / (e1 + e0);
    e1 *= scale;
    e0 *= scale;
  }
  return ErrorRates{e1, e0};
}

SignalGrid gen_signals(const World& world, const Assignment& assignment,
                       const std::vector<AgentParams>& agents, std::uint64_t seed) {
  if (assignment.task_count() != world.truth.size()) {
    throw ValidationError("assignment does not cover the world's tasks");
  }
  SignalGrid grid(assignment.task_count());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const int y = world.truth[k];
    for (std::size_t slot = 0; slot < 3; ++slot) {
      const std::size_t i = assignment.members[k][slot];
      const ErrorRates e = effective_rates(agents.at(i), seed, k, i);
      grid[k][slot] = rng::bernoulli(e.prob_one(y), seed, rng::Stream::signals, k, i) ? 1 : 0;
    }
  }
  return grid;
}

Report apply_strategy(const Strategy& strategy, const Report& info, std::uint64_t seed,
                      std::size_t task, std::size_t agent) {
  if (const auto* s = std::get_if<SignalStrategy>(&strategy)) {
    const auto* sig = std::get_if<Signal>(&info);
    if (sig == nullptr) throw ValidationError("signal strategy applied to a prediction");
    const double p = s->prob_one(check_binary(sig->value, "signal"));
    return Signal{rng::bernoulli(p, seed, rng::Stream::strategies, task, agent) ? 1 : 0};
  }
  const auto& ps = std::get<PredictionStrategy>(strategy);
  const auto* pred = std::get_if<Prediction>(&info);
  if (pred == nullptr) throw ValidationError("prediction strategy applied to a signal");
  return Prediction{std::clamp(ps.apply(check_unit(pred->value, "prediction")), 0.0, 1.0)};
}

int sample_signal_from_prediction(double p, std::uint64_t seed, std::size_t task,
                                  std::size_t agent) {
  check_unit(p, "prediction");
  return rng::bernoulli(p, seed, rng::Stream::sampling, task, agent) ? 1 : 0;
}

ScoreTable true_scores(const ReportTable& reports, const ScoringRule& rule,
                       Elicitation elicitation) {
  ScoreTable table;
  table.agents.resize(reports.agent_count());
  for (std::size_t i = 0; i < reports.agent_count(); ++i) table.agents[i].id = reports.agent_ids[i];
  std::vector<double> sums(reports.agent_count(), 0.0);
  for (std::size_t k = 0; k < reports.tasks.size(); ++k) {
    const Task& task = reports.tasks[k];
    table.task_ids.push_back(task.id);
    if (task.responses.empty()) continue;
    if (!task.truth) throw ValidationError("task '" + task.id + "' has no ground truth");
    for (const auto& r : task.responses) {
      const double v = rule.score(report_of(r, elicitation), *task.truth);
      table.entries.push_back(TaskScore{k, r.agent, v, true});
      sums[r.agent] += v;
      ++table.agents[r.agent].n_tasks;
    }
  }
  for (std::size_t i = 0; i < table.agents.size(); ++i) {
    auto& a = table.agents[i];
    a.scored = a.n_tasks > 0;
    a.mean_score = a.n_tasks > 0 ? sums[i] / static_cast<double>(a.n_tasks) : 0.0;
  }
  return table;
}

std::vector<AgentParams> draw_agents(const RateModel& model, std::size_t count,
                                     double task_jitter, std::uint64_t seed) {
  std::vector<AgentParams> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r1 = rng::uniform(seed, rng::Stream::rates, i, 1);
    const double r0 = rng::uniform(seed, rng::Stream::rates, i, 0);
    ErrorRates e;
    if (model.kind == RateModel::Kind::uniform) {
      e.e1 = model.low + (model.high - model.low) * r1;
      e.e0 = model.low + (model.high - model.low) * r0;
    } else {
      e.e1 = std::clamp(model.mean.e1 + (2.0 * r1 - 1.0) * model.spread, 0.0, 1.0);
      e.e0 = std::clamp(model.mean.e0 + (2.0 * r0 - 1.0) * model.spread, 0.0, 1.0);
    }
    if (!model.allow_negative_informative && e.e1 + e.e0 >= 1.0) {
      throw ValidationError("rate model produced an agent with e1 + e0 >= 1; "
                            "enable negative-informative agents or narrow the range");
    }
    out[i] = AgentParams{e, task_jitter};
  }
  return out;
}

std::string agent_label(std::size_t index, std::size_t count) {
  const int width = std::max<int>(3, static_cast<int>(std::to_string(count).size()));
  char buf[32];
  std::snprintf(buf, sizeof buf, "a%0*zu", width, index);
  return buf;
}

std::string task_label(std::size_t index, std::size_t count) {
  const int width = std::max<int>(5, static_cast<int>(std::to_string(count).size()));
  char buf[32];
  std::snprintf(buf, sizeof buf, "t%0*zu", width, index);
  return buf;
}

Simulation simulate(const SimConfig& config) {
  if (config.agents < 3) throw ValidationError("simulation needs at least 3 agents");
  if (config.tasks < 1) throw ValidationError("simulation needs at least 1 task");
  if (!(config.behaviour_fraction >= 0.0 && config.behaviour_fraction <= 1.0)) {
    throw ValidationError("behaviour fraction must lie in [0, 1]");
  }
  const std::uint64_t seed = config.seed;
  Simulation sim;
  sim.world = gen_world(config.prior, config.tasks, seed);
  sim.assignment = assign_tasks(config.tasks, config.agents, seed);
  sim.agents = draw_agents(config.rates, config.agents, config.task_jitter, seed);

  const auto deviants = static_cast<std::size_t>(
      std::ceil(config.behaviour_fraction * static_cast<double>(config.agents) - 1e-9));
  sim.behaviours.assign(config.agents, Behaviour{});
  for (std::size_t i = 0; i < deviants; ++i) sim.behaviours[i] = config.behaviour;

  const SignalGrid signals = gen_signals(sim.world, sim.assignment, sim.agents, seed);

  ReportTable& table = sim.reports;
  table.agent_ids.reserve(config.agents);
  for (std::size_t i = 0; i < config.agents; ++i) {
    table.agent_ids.push_back(agent_label(i, config.agents));
  }
  table.tasks.resize(config.tasks);
  for (std::size_t k = 0; k < config.tasks; ++k) {
    Task& task = table.tasks[k];
    task.id = task_label(k, config.tasks);
    task.truth = sim.world.truth[k];
    for (std::size_t slot = 0; slot < 3; ++slot) {
      const std::size_t i = sim.assignment.members[k][slot];
      const int s = signals[k][slot];
      const Behaviour& b = sim.behaviours[i];
      Response r;
      r.agent = i;
      const bool want_answer = config.elicitation == Elicitation::signal ||
                               config.answers_with_predictions;
      if (want_answer) {
        r.signal = std::get<Signal>(apply_strategy(b.signal, Signal{s}, seed, k, i)).value;
      }
      if (config.elicitation == Elicitation::prediction) {
        const double post = posterior_from_signal(s, sim.agents[i].rates, config.prior);
        r.prediction =
            std::get<Prediction>(apply_strategy(b.prediction, Prediction{post}, seed, k, i)).value;
      }
      task.responses.push_back(r);
    }
  }
  return sim;
}

ErrorRates pool_rates_excluding(const std::vector<AgentParams>& agents, std::size_t i) {
  double e1 = 0.0, e0 = 0.0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < agents.size(); ++j) {
    if (j == i) continue;
    e1 += agents[j].rates.e1;
    e0 += agents[j].rates.e0;
    ++n;
  }
  if (n == 0) throw ValidationError("pool is empty");
  return ErrorRates{e1 / n, e0 / n};
}

}  // namespace serum

#include "serum/dts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "serum/error.hpp"
#include "serum/parallel.hpp"
#include "serum/random.hpp"
#include "serum/surrogate.hpp"

namespace serum {

Assignment assign_tasks(std::size_t tasks, std::size_t agents, std::uint64_t seed) {
  if (agents < 3) throw ValidationError("assignment needs at least 3 agents");
  if (tasks < 1) throw ValidationError("assignment needs at least 1 task");
  Assignment a;
  a.members.resize(tasks);
  a.load.assign(agents, 0);

  rng::Sequence draw(seed, rng::Stream::assignment);
  std::vector<std::size_t> deck(agents);
  std::iota(deck.begin(), deck.end(), std::size_t{0});
  draw.shuffle(std::span(deck));
  std::size_t pos = 0;

  for (std::size_t k = 0; k < tasks; ++k) {
    auto& triple = a.members[k];
    for (std::size_t slot = 0; slot < 3; ++slot) {
      if (pos == agents) {
        draw.shuffle(std::span(deck));
        pos = 0;
      }
      // A fresh deck can repeat an agent already placed on this task.
      auto taken = [&](std::size_t agent) {
        return std::find(triple.begin(), triple.begin() + slot, agent) != triple.begin() + slot;
      };
      std::size_t j = pos;
      while (taken(deck[j])) ++j;
      std::swap(deck[pos], deck[j]);
      triple[slot] = deck[pos++];
      ++a.load[triple[slot]];
    }
  }
  return a;
}

const char* to_string(ReferenceMode m) {
  return m == ReferenceMode::random_peer ? "random_peer" : "average_peers";
}

const char* to_string(MomentEstimator m) {
  return m == MomentEstimator::positional ? "positional" : "symmetric";
}

ReferenceMode parse_reference_mode(const std::string& s) {
  if (s == "random_peer") return ReferenceMode::random_peer;
  if (s == "average_peers") return ReferenceMode::average_peers;
  throw ValidationError("unknown reference mode '" + s + "' (expected random_peer|average_peers)");
}

MomentEstimator parse_moment_estimator(const std::string& s) {
  if (s == "positional") return MomentEstimator::positional;
  if (s == "symmetric") return MomentEstimator::symmetric;
  throw ValidationError("unknown moment estimator '" + s + "' (expected positional|symmetric)");
}

int reference_signal(const Response& r, std::size_t task, std::uint64_t seed) {
  if (r.signal) return *r.signal;
  if (r.prediction) return sample_signal_from_prediction(*r.prediction, seed, task, r.agent);
  throw ValidationError("response carries neither a signal nor a prediction");
}

namespace {

std::vector<const Response*> peers_of(const Task& task, std::size_t agent) {
  std::vector<const Response*> peers;
  bool found = false;
  for (const auto& r : task.responses) {
    if (r.agent == agent) {
      found = true;
    } else {
      peers.push_back(&r);
    }
  }
  if (!found) throw ValidationError("agent did not answer task '" + task.id + "'");
  if (peers.empty()) throw ValidationError("task '" + task.id + "' has no peer report");
  return peers;
}

std::size_t peer_draw(std::uint64_t seed, std::size_t task, std::size_t agent, std::size_t n) {
  rng::Sequence draw(seed, rng::Stream::reference, task, agent);
  return static_cast<std::size_t>(draw.below(n));
}

/// Responder positions of one task in the run's shuffled order.
std::vector<std::size_t> responder_order(const Task& task, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> order(task.responses.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng::Sequence draw(seed, rng::Stream::order, k);
  draw.shuffle(std::span(order));
  return order;
}

/// Per-task data shared by every agent's leave-one-out pass.
struct Prepared {
  std::vector<std::vector<std::size_t>> order;
  std::vector<std::vector<std::uint8_t>> reference;  // by response position
};

Prepared prepare(const ReportTable& reports, std::uint64_t seed) {
  Prepared p;
  p.order.resize(reports.tasks.size());
  p.reference.resize(reports.tasks.size());
  for (std::size_t k = 0; k < reports.tasks.size(); ++k) {
    const Task& task = reports.tasks[k];
    p.order[k] = responder_order(task, k, seed);
    auto& refs = p.reference[k];
    refs.reserve(task.responses.size());
    for (const auto& r : task.responses) {
      refs.push_back(static_cast<std::uint8_t>(reference_signal(r, k, seed)));
    }
  }
  return p;
}

std::vector<Triple> triples_for(const ReportTable& reports, const Prepared& prep,
                                std::size_t agent) {
  std::vector<Triple> out;
  out.reserve(reports.tasks.size());
  for (std::size_t k = 0; k < reports.tasks.size(); ++k) {
    const Task& task = reports.tasks[k];
    if (task.responses.size() < 3) continue;
    Triple t{};
    std::size_t filled = 0;
    for (std::size_t pos : prep.order[k]) {
      if (task.responses[pos].agent == agent) continue;
      if (filled < 3) t[filled++] = prep.reference[k][pos];
    }
    // Three-responder tasks that include the agent leave only two peers.
    if (filled == 3) out.push_back(t);
  }
  return out;
}

EstimationResult solve(const std::vector<Triple>& triples, const DtsConfig& config) {
  const Moments m = config.estimator == MomentEstimator::symmetric
                        ? estimate_moments_symmetric(triples, config.min_tasks)
                        : estimate_moments(triples, config.min_tasks);
  EstimationResult r = config.prior_mode.known
                           ? solve_known_prior(m, config.prior_mode.prior, config.solver)
                           : solve_unknown_prior(m, config.prior_mode.p0_majority, config.solver);
  r.diagnostics.sample_count = triples.size();
  return r;
}

}  // namespace

int pick_reference(const Task& task, std::size_t task_index, std::size_t agent,
                   std::uint64_t seed) {
  const auto peers = peers_of(task, agent);
  const auto* chosen = peers[peer_draw(seed, task_index, agent, peers.size())];
  return reference_signal(*chosen, task_index, seed);
}

std::vector<Triple> leave_one_out_triples(const ReportTable& reports, std::size_t agent,
                                          std::uint64_t seed) {
  return triples_for(reports, prepare(reports, seed), agent);
}

EstimationResult estimate_pool(const ReportTable& reports, std::size_t agent,
                               const DtsConfig& config) {
  return solve(leave_one_out_triples(reports, agent, config.seed), config);
}

ScoreTable dts_run(const ReportTable& reports, const DtsConfig& config) {
  if (config.solver.kappa < 0.0) throw ValidationError("kappa must be nonnegative");
  if (config.rule.takes_signal() != (config.elicitation == Elicitation::signal)) {
    throw ValidationError(std::string("rule ") + to_string(config.rule.kind()) +
                          " does not match " + to_string(config.elicitation) + " elicitation");
  }
  if (config.prior_mode.known) {
    // Surface a uniform prior as a validation error before any work.
    Prior::make(config.prior_mode.prior.p0, config.prior_mode.prior.p1);
    if (config.prior_mode.prior.near_uniform(config.solver.uniform_prior_tol)) {
      throw ValidationError("known-prior mode needs p0 != p1");
    }
  }

  const std::size_t n_agents = reports.agent_count();
  const Prepared prep = prepare(reports, config.seed);

  ScoreTable table;
  table.task_ids.reserve(reports.tasks.size());
  std::vector<std::size_t> offset(reports.tasks.size() + 1, 0);
  for (std::size_t k = 0; k < reports.tasks.size(); ++k) {
    table.task_ids.push_back(reports.tasks[k].id);
    offset[k + 1] = offset[k] + reports.tasks[k].responses.size();
  }
  table.entries.resize(offset.back());
  for (std::size_t k = 0; k < reports.tasks.size(); ++k) {
    const auto& responses = reports.tasks[k].responses;
    for (std::size_t pos = 0; pos < responses.size(); ++pos) {
      table.entries[offset[k] + pos] = TaskScore{k, responses[pos].agent, 0.0, false};
    }
  }

  // Which (task, position) cells each agent owns.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> owned(n_agents);
  for (std::size_t k = 0; k < reports.tasks.size(); ++k) {
    const auto& responses = reports.tasks[k].responses;
    for (std::size_t pos = 0; pos < responses.size(); ++pos) {
      owned.at(responses[pos].agent).emplace_back(k, pos);
    }
  }

  table.agents.resize(n_agents);
  parallel_for(n_agents, config.jobs, [&](std::size_t i) {
    AgentSummary& summary = table.agents[i];
    summary.id = reports.agent_ids[i];
    summary.n_tasks = owned[i].size();

    const auto triples = triples_for(reports, prep, i);
    if (triples.size() < config.min_tasks || triples.empty()) {
      summary.scored = false;
      summary.informative = false;
      return;
    }
    const EstimationResult est = solve(triples, config);
    summary.estimation = est;
    summary.informative = est.informative;
    if (!est.informative) return;  // hard zero on every task

    ScoringRule rule = config.rule;
    if (!config.prior_mode.known && rule.takes_signal() && est.prior_recovered) {
      rule = rule.with_prior(*est.prior_recovered);
    }

    double total = 0.0;
    std::size_t counted = 0;
    for (const auto& [k, pos] : owned[i]) {
      const Task& task = reports.tasks[k];
      const ScorePair s = ScorePair::of(rule, report_of(task.responses[pos], config.elicitation));
      std::vector<std::size_t> peers;
      for (std::size_t q = 0; q < task.responses.size(); ++q) {
        if (q != pos) peers.push_back(q);
      }
      if (peers.empty()) continue;  // a lone responder has no reference; left at zero
      double value = 0.0;
      if (config.reference == ReferenceMode::random_peer) {
        const std::size_t q = peers[peer_draw(config.seed, k, i, peers.size())];
        value = ssr(s, prep.reference[k][q], est.rates);
      } else {
        for (std::size_t q : peers) value += ssr(s, prep.reference[k][q], est.rates);
        value /= static_cast<double>(peers.size());
      }
      table.entries[offset[k] + pos].value = value;
      table.entries[offset[k] + pos].informative = true;
      total += value;
      ++counted;
    }
    summary.mean_score = counted > 0 ? total / static_cast<double>(counted) : 0.0;
  });
  return table;
}

ErrorRates analytic_pool_rates(std::span<const AnalyticAgent> others, const Prior& prior) {
  if (others.empty()) throw ValidationError("reference pool is empty");
  double one_given_1 = 0.0;
  double one_given_0 = 0.0;
  for (const auto& peer : others) {
    if (const auto* s = std::get_if<SignalStrategy>(&peer.strategy)) {
      const ErrorRates r = s->report_rates(peer.rates);
      one_given_1 += r.prob_one(1);
      one_given_0 += r.prob_one(0);
      continue;
    }
    const auto& ps = std::get<PredictionStrategy>(peer.strategy);
    for (int sig = 0; sig <= 1; ++sig) {
      const double q = std::clamp(ps.apply(posterior_from_signal(sig, peer.rates, prior)), 0.0, 1.0);
      const double s1 = sig == 1 ? peer.rates.prob_one(1) : 1.0 - peer.rates.prob_one(1);
      const double s0 = sig == 1 ? peer.rates.prob_one(0) : 1.0 - peer.rates.prob_one(0);
      one_given_1 += s1 * q;
      one_given_0 += s0 * q;
    }
  }
  const auto n = static_cast<double>(others.size());
  return ErrorRates{1.0 - one_given_1 / n, one_given_0 / n};
}

double expected_dts_given_rates(const AnalyticAgent& agent, const ErrorRates& pool,
                                const ErrorRates& estimated, const Prior& prior,
                                const ScoringRule& rule, double kappa) {
  if (!informativeness(estimated, kappa)) return 0.0;
  const bool signal_strategy = std::holds_alternative<SignalStrategy>(agent.strategy);
  if (signal_strategy != rule.takes_signal()) {
    throw ValidationError("agent strategy does not match the rule's report type");
  }

  // E_z|y phi(report, z) under the pool's true channel.
  auto conditional = [&](const Report& report, int y) {
    const ScorePair s = ScorePair::of(rule, report);
    const double one = pool.prob_one(y);
    return one * ssr(s, 1, estimated) + (1.0 - one) * ssr(s, 0, estimated);
  };

  double total = 0.0;
  for (int y = 0; y <= 1; ++y) {
    for (int sig = 0; sig <= 1; ++sig) {
      const double p_sig = sig == 1 ? agent.rates.prob_one(y) : 1.0 - agent.rates.prob_one(y);
      const double weight = prior.mass(y) * p_sig;
      if (weight == 0.0) continue;
      if (signal_strategy) {
        const double f = std::get<SignalStrategy>(agent.strategy).prob_one(sig);
        double v = 0.0;
        if (f > 0.0) v += f * conditional(Signal{1}, y);
        if (f < 1.0) v += (1.0 - f) * conditional(Signal{0}, y);
        total += weight * v;
      } else {
        const auto& ps = std::get<PredictionStrategy>(agent.strategy);
        const double post = posterior_from_signal(sig, agent.rates, prior);
        total += weight * conditional(Prediction{std::clamp(ps.apply(post), 0.0, 1.0)}, y);
      }
    }
  }
  return total;
}

double exact_expected_dts(const AnalyticAgent& agent, std::span<const AnalyticAgent> others,
                          const Prior& prior, const ScoringRule& rule, double kappa) {
  const ErrorRates pool = analytic_pool_rates(others, prior);
  return expected_dts_given_rates(agent, pool, pool, prior, rule, kappa);
}

}  // namespace serum

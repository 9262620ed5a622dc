#include "serum/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "serum/error.hpp"
#include "serum/parallel.hpp"
#include "serum/random.hpp"

namespace serum {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ValidationError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  // Linear interpolation between order statistics (type 7).
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

MseResult mse(const std::vector<double>& est, const std::vector<double>& truth,
              std::size_t resamples, std::uint64_t seed) {
  if (est.size() != truth.size()) throw ValidationError("mse: agent sets differ in size");
  if (est.empty()) throw ValidationError("mse: no agents");
  const std::size_t n = est.size();
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (est[i] - truth[i]) * (est[i] - truth[i]);

  MseResult r;
  r.mse = std::accumulate(sq.begin(), sq.end(), 0.0) / static_cast<double>(n);
  if (resamples == 0) {
    r.ci_low = r.ci_high = r.mse;
    return r;
  }
  std::vector<double> boot(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    rng::Sequence draw(seed, rng::Stream::bootstrap, b);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) total += sq[draw.below(n)];
    boot[b] = total / static_cast<double>(n);
  }
  r.ci_low = quantile(boot, 0.025);
  r.ci_high = quantile(boot, 0.975);
  return r;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double r = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> rank_correlation(const std::vector<double>& est,
                                       const std::vector<double>& truth) {
  if (est.size() != truth.size()) throw ValidationError("rank correlation: size mismatch");
  if (est.size() < 2) throw ValidationError("rank correlation needs at least 2 agents");
  const auto a = average_ranks(est);
  const auto b = average_ranks(truth);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> pts_baseline(const ReportTable& reports, std::uint64_t seed,
                                 ReferenceMode mode) {
  // Answers and their global frequencies.
  std::vector<std::vector<int>> answers(reports.tasks.size());
  double ones = 0.0, total = 0.0;
  for (std::size_t k = 0; k < reports.tasks.size(); ++k) {
    for (const auto& r : reports.tasks[k].responses) {
      const int a = reference_signal(r, k, seed);
      answers[k].push_back(a);
      ones += a;
      total += 1.0;
    }
  }
  const double freq[2] = {total > 0 ? (total - ones) / total : 0.0,
                          total > 0 ? ones / total : 0.0};
  auto agree = [&](int a, int z) { return a == z && freq[a] > 0.0 ? 1.0 / freq[a] : 0.0; };

  std::vector<double> sums(reports.agent_count(), 0.0);
  std::vector<std::size_t> counts(reports.agent_count(), 0);
  for (std::size_t k = 0; k < reports.tasks.size(); ++k) {
    const Task& task = reports.tasks[k];
    if (task.responses.size() < 2) continue;
    for (std::size_t pos = 0; pos < task.responses.size(); ++pos) {
      const std::size_t agent = task.responses[pos].agent;
      const int a = answers[k][pos];
      double value = 0.0;
      if (mode == ReferenceMode::random_peer) {
        value = agree(a, pick_reference(task, k, agent, seed));
      } else {
        for (std::size_t q = 0; q < task.responses.size(); ++q) {
          if (q != pos) value += agree(a, answers[k][q]);
        }
        value /= static_cast<double>(task.responses.size() - 1);
      }
      sums[agent] += value;
      ++counts[agent];
    }
  }
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (counts[i] > 0) sums[i] /= static_cast<double>(counts[i]);
  }
  return sums;
}

// ---------------------------------------------------------------------------
// Consistency

namespace {

double rate_error(const ErrorRates& est, const ErrorRates& truth) {
  return std::max(std::abs(est.e0 - truth.e0), std::abs(est.e1 - truth.e1));
}

struct SeedErrors {
  double known = 0.0;
  double one_bit = 0.0;
};

// Leave-one-out symmetric moments for every agent from one pass over the
// tasks: global sums minus the sums over the agent's own tasks. Equivalent to
// estimate_moments_symmetric on each agent's triples, without rebuilding them.
SeedErrors sweep_seed(const SweepOptions& o, std::size_t agents, std::size_t tasks,
                      std::uint64_t seed) {
  SimConfig cfg;
  cfg.agents = agents;
  cfg.tasks = tasks;
  cfg.prior = o.prior;
  cfg.rates = o.rates;
  cfg.seed = seed;
  const Simulation sim = simulate(cfg);

  double g1 = 0.0, g2 = 0.0, g3 = 0.0;
  std::vector<double> a1(agents, 0.0), a2(agents, 0.0), a3(agents, 0.0);
  std::vector<std::size_t> own(agents, 0);
  for (const auto& task : sim.reports.tasks) {
    const int x = *task.responses[0].signal;
    const int y = *task.responses[1].signal;
    const int z = *task.responses[2].signal;
    const double s1 = (x + y + z) / 3.0;
    const double s2 = (x * y + x * z + y * z) / 3.0;
    const double s3 = x * y * z;
    g1 += s1;
    g2 += s2;
    g3 += s3;
    for (const auto& r : task.responses) {
      a1[r.agent] += s1;
      a2[r.agent] += s2;
      a3[r.agent] += s3;
      ++own[r.agent];
    }
  }

  SolverOptions opts;
  SeedErrors out;
  for (std::size_t i = 0; i < agents; ++i) {
    const double n = static_cast<double>(tasks - own[i]);
    if (tasks - own[i] < kDefaultMinTasks) throw ValidationError("sweep cell has too few tasks");
    const Moments m{(g1 - a1[i]) / n, (g2 - a2[i]) / n, (g3 - a3[i]) / n};
    const ErrorRates truth = pool_rates_excluding(sim.agents, i);
    out.known += rate_error(solve_known_prior(m, o.prior, opts).rates, truth);
    out.one_bit += rate_error(solve_unknown_prior(m, o.prior.p0 > 0.5, opts).rates, truth);
  }
  out.known /= static_cast<double>(agents);
  out.one_bit /= static_cast<double>(agents);
  return out;
}

}  // namespace

std::vector<SweepCell> run_consistency_sweep(const SweepOptions& o) {
  if (o.seeds == 0) throw ValidationError("sweep needs at least one seed");
  std::vector<std::pair<std::size_t, std::size_t>> grid;
  for (std::size_t n : o.agents) {
    for (std::size_t k : o.tasks) grid.emplace_back(n, k);
  }
  std::vector<SeedErrors> errors(grid.size() * o.seeds);
  parallel_for(errors.size(), o.jobs, [&](std::size_t job) {
    const auto& [n, k] = grid[job / o.seeds];
    errors[job] = sweep_seed(o, n, k, o.seed + job % o.seeds);
  });

  std::vector<SweepCell> cells;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    std::vector<double> known, one_bit;
    for (std::size_t s = 0; s < o.seeds; ++s) {
      known.push_back(errors[c * o.seeds + s].known);
      one_bit.push_back(errors[c * o.seeds + s].one_bit);
    }
    SweepCell cell;
    cell.agents = grid[c].first;
    cell.tasks = grid[c].second;
    cell.seeds = o.seeds;
    cell.known_median = median(known);
    cell.known_q1 = quantile(known, 0.25);
    cell.known_q3 = quantile(known, 0.75);
    cell.one_bit_median = median(one_bit);
    cell.one_bit_q1 = quantile(one_bit, 0.25);
    cell.one_bit_q3 = quantile(one_bit, 0.75);
    cells.push_back(cell);
  }
  return cells;
}

double exact_moment_error(const std::vector<AgentParams>& agents, const Prior& prior) {
  double worst = 0.0;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const ErrorRates pool = pool_rates_excluding(agents, i);
    const Moments m = forward_moments(prior, pool);
    worst = std::max(worst, rate_error(solve_unknown_prior(m, prior.p0 > 0.5).rates, pool));
    if (!prior.near_uniform(1e-9)) {
      worst = std::max(worst, rate_error(solve_known_prior(m, prior).rates, pool));
    }
  }
  return worst;
}

ReplacementBias without_replacement_bias(std::size_t pool_size, const ErrorRates& mean,
                                         double spread, const Prior& prior) {
  if (pool_size < 3) throw ValidationError("pool needs at least 3 agents");
  const double n = static_cast<double>(pool_size);
  // Power sums of u_j = Pr[1 | y=0] and v_j = Pr[1 | y=1].
  double u1 = 0, u2 = 0, u3 = 0, v1 = 0, v2 = 0, v3 = 0;
  ErrorRates avg{0.0, 0.0};
  for (std::size_t j = 0; j < pool_size; ++j) {
    const double t = -spread + 2.0 * spread * static_cast<double>(j) / (n - 1.0);
    const ErrorRates e{mean.e1 + t, mean.e0 - t};
    avg.e1 += e.e1 / n;
    avg.e0 += e.e0 / n;
    const double u = e.e0, v = 1.0 - e.e1;
    u1 += u, u2 += u * u, u3 += u * u * u;
    v1 += v, v2 += v * v, v3 += v * v * v;
  }
  // Expected products over ordered draws of distinct agents.
  auto pair = [&](double s1, double s2) { return (s1 * s1 - s2) / (n * (n - 1.0)); };
  auto trip = [&](double s1, double s2, double s3) {
    return (s1 * s1 * s1 - 3.0 * s1 * s2 + 2.0 * s3) / (n * (n - 1.0) * (n - 2.0));
  };
  const Moments m{prior.p0 * u1 / n + prior.p1 * v1 / n,
                  prior.p0 * pair(u1, u2) + prior.p1 * pair(v1, v2),
                  prior.p0 * trip(u1, u2, u3) + prior.p1 * trip(v1, v2, v3)};
  const Moments pooled = forward_moments(prior, avg);
  ReplacementBias bias;
  bias.moments = std::max({std::abs(m.c1 - pooled.c1), std::abs(m.c2 - pooled.c2),
                           std::abs(m.c3 - pooled.c3)});
  bias.rates = rate_error(solve_unknown_prior(m, prior.p0 > 0.5).rates, avg);
  return bias;
}

// ---------------------------------------------------------------------------
// Dominance

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::strict: return "strict";
    case Verdict::weak_zero: return "weak-zero";
    case Verdict::violation: return "violation";
  }
  return "?";
}

namespace {

struct Profile {
  std::string name;
  std::vector<SignalStrategy> strategies;  // one per other agent
};

constexpr std::size_t kOthers = 8;

std::string grid_name(double f0, double f1) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "f0=%.2f f1=%.2f", f0, f1);
  return buf;
}

std::vector<Profile> other_profiles() {
  std::vector<Profile> out;
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; b <= 4; ++b) {
      const SignalStrategy s{a / 4.0, b / 4.0};
      out.push_back({"all " + grid_name(s.f0, s.f1), std::vector(kOthers, s)});
    }
  }
  const std::pair<const char*, SignalStrategy> mixes[] = {
      {"flip", SignalStrategy::flip()},
      {"always-0", SignalStrategy::always(0)},
      {"always-1", SignalStrategy::always(1)},
      {"random", SignalStrategy{0.5, 0.5}},
  };
  for (const auto& [name, s] : mixes) {
    for (std::size_t q = 1; q <= 3; ++q) {
      Profile p;
      p.name = std::to_string(q * 25) + "% " + name;
      p.strategies.assign(kOthers, SignalStrategy::truthful());
      for (std::size_t j = 0; j < q * kOthers / 4; ++j) p.strategies[j] = s;
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<AnalyticAgent> others_with(const Profile& p) {
  std::vector<AnalyticAgent> out;
  for (std::size_t j = 0; j < p.strategies.size(); ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(kOthers - 1);
    out.push_back({ErrorRates{0.1 + 0.25 * t, 0.35 - 0.2 * t}, p.strategies[j]});
  }
  return out;
}

struct Deviation {
  std::string name;
  Strategy strategy;
};

std::vector<Deviation> signal_deviations() {
  std::vector<Deviation> out;
  for (int a = 0; a <= 10; ++a) {
    for (int b = 0; b <= 10; ++b) {
      if (a == 0 && b == 10) continue;
      out.push_back({grid_name(a / 10.0, b / 10.0), SignalStrategy{a / 10.0, b / 10.0}});
    }
  }
  return out;
}

std::vector<Deviation> prediction_deviations() {
  std::vector<Deviation> out{{"flip", PredictionStrategy::flip()}};
  char buf[32];
  for (int c = 0; c <= 10; ++c) {
    std::snprintf(buf, sizeof buf, "constant %.1f", c / 10.0);
    out.push_back({buf, PredictionStrategy::constant(c / 10.0)});
  }
  for (int l = 1; l <= 10; ++l) {
    std::snprintf(buf, sizeof buf, "shrink %.1f", l / 10.0);
    out.push_back({buf, PredictionStrategy::shrink(l / 10.0)});
  }
  return out;
}

std::string rates_name(const ErrorRates& e) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "e1=%.2f e0=%.2f", e.e1, e.e0);
  return buf;
}

}  // namespace

std::vector<DominanceRow> run_dominance_grid(const DominanceOptions& o) {
  const ErrorRates agent_rates[] = {{0.1, 0.2}, {0.2, 0.3}, {0.35, 0.25}};
  const auto sig_devs = signal_deviations();
  const auto pred_devs = prediction_deviations();

  std::vector<DominanceRow> rows;
  for (const auto& profile : other_profiles()) {
    const auto others = others_with(profile);
    const ErrorRates pool = analytic_pool_rates(others, o.prior);
    const bool informative = informativeness(pool, o.kappa);
    for (const auto& rates : agent_rates) {
      const ScoringRule rules[] = {
          ScoringRule::one_over_prior(o.prior),
          ScoringRule::posterior_signal(o.prior, rates),
          ScoringRule::brier(),
          ScoringRule::logarithmic(),
      };
      for (const auto& rule : rules) {
        const bool signal = rule.takes_signal();
        const Strategy truthful = signal ? Strategy{SignalStrategy::truthful()}
                                         : Strategy{PredictionStrategy::truthful()};
        const double base =
            exact_expected_dts({rates, truthful}, others, o.prior, rule, o.kappa);
        for (const auto& dev : signal ? sig_devs : pred_devs) {
          DominanceRow row;
          row.profile = profile.name;
          row.rule = to_string(rule.kind());
          row.agent = rates_name(rates);
          row.deviation = dev.name;
          row.pool_informative = informative;
          row.truthful = base;
          row.deviant = exact_expected_dts({rates, dev.strategy}, others, o.prior, rule, o.kappa);
          row.margin = row.truthful - row.deviant;
          if (informative) {
            row.verdict = row.margin > o.threshold ? Verdict::strict : Verdict::violation;
          } else {
            row.verdict = row.truthful == 0.0 && row.deviant == 0.0 ? Verdict::weak_zero
                                                                    : Verdict::violation;
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Fidelity

FidelityReport run_fidelity(const FidelityOptions& o) {
  if (o.seeds == 0) throw ValidationError("fidelity run needs at least one seed");
  FidelityReport report;
  report.seeds.resize(o.seeds);
  std::vector<std::vector<FidelityAgent>> per_seed(o.seeds);
  const ScoringRule truth_rule = o.dts.rule;

  parallel_for(o.seeds, o.dts.jobs, [&](std::size_t s) {
    const std::uint64_t seed = o.seed + s;
    SimConfig cfg = o.simulation;
    cfg.agents = o.agents;
    cfg.tasks = o.tasks;
    cfg.seed = seed;
    const Simulation sim = simulate(cfg);

    DtsConfig dts = o.dts;
    dts.seed = seed;
    dts.jobs = 1;
    const ScoreTable scores = dts_run(sim.reports, dts);
    const ScoreTable truth = true_scores(sim.reports, truth_rule, dts.elicitation);
    const auto pts = pts_baseline(sim.reports, seed, ReferenceMode::random_peer);
    const auto pts_avg = pts_baseline(sim.reports, seed, ReferenceMode::average_peers);

    auto& agents = per_seed[s];
    std::size_t close = 0;
    for (std::size_t i = 0; i < scores.agents.size(); ++i) {
      agents.push_back(FidelityAgent{scores.agents[i].id, truth.agents[i].mean_score,
                                     scores.agents[i].mean_score, pts[i]});
      if (std::abs(agents.back().dts_mean - agents.back().true_mean) <= o.tolerance) ++close;
    }
    const auto dts_means = scores.means();
    const auto true_means = truth.means();
    FidelitySeed& out = report.seeds[s];
    out.seed = seed;
    out.within_tolerance = static_cast<double>(close) / static_cast<double>(agents.size());
    out.dts_rank = rank_correlation(dts_means, true_means);
    out.pts_rank = rank_correlation(pts, true_means);
    out.pts_avg_rank = rank_correlation(pts_avg, true_means);
    out.dts_mse = mse(dts_means, true_means, o.bootstrap, seed);
  });

  report.first_seed = per_seed.front();
  std::vector<double> within, dts_rank, pts_rank, pts_avg_rank;
  for (const auto& s : report.seeds) {
    within.push_back(s.within_tolerance);
    // An undefined correlation counts as no agreement at all.
    dts_rank.push_back(s.dts_rank.value_or(0.0));
    pts_rank.push_back(s.pts_rank.value_or(0.0));
    pts_avg_rank.push_back(s.pts_avg_rank.value_or(0.0));
  }
  report.median_within = median(within);
  report.min_within = *std::min_element(within.begin(), within.end());
  report.median_dts_rank = median(dts_rank);
  report.min_dts_rank = *std::min_element(dts_rank.begin(), dts_rank.end());
  report.median_pts_rank = median(pts_rank);
  report.median_pts_avg_rank = median(pts_avg_rank);
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string("NA");
}

}  // namespace

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::string out =
      "agents,tasks,seeds,known_median,known_q1,known_q3,one_bit_median,one_bit_q1,one_bit_q3\n";
  for (const auto& c : cells) {
    out += std::to_string(c.agents) + ',' + std::to_string(c.tasks) + ',' +
           std::to_string(c.seeds) + ',' + format_number(c.known_median) + ',' +
           format_number(c.known_q1) + ',' + format_number(c.known_q3) + ',' +
           format_number(c.one_bit_median) + ',' + format_number(c.one_bit_q1) + ',' +
           format_number(c.one_bit_q3) + '\n';
  }
  return out;
}

std::string dominance_csv(const std::vector<DominanceRow>& rows) {
  std::string out =
      "profile,rule,agent,deviation,pool_informative,truthful,deviant,margin,verdict\n";
  for (const auto& r : rows) {
    out += r.profile + ',' + r.rule + ',' + r.agent + ',' + r.deviation + ',' +
           (r.pool_informative ? "true" : "false") + ',' + format_number(r.truthful) + ',' +
           format_number(r.deviant) + ',' + format_number(r.margin) + ',' +
           to_string(r.verdict) + '\n';
  }
  return out;
}

std::string fidelity_seeds_csv(const FidelityReport& report) {
  std::string out = "seed,within_tolerance,dts_rank,pts_rank,pts_avg_rank,mse,mse_ci_low,mse_ci_high\n";
  for (const auto& s : report.seeds) {
    out += std::to_string(s.seed) + ',' + format_number(s.within_tolerance) + ',' +
           optional_number(s.dts_rank) + ',' + optional_number(s.pts_rank) + ',' +
           optional_number(s.pts_avg_rank) + ',' +
           format_number(s.dts_mse.mse) + ',' + format_number(s.dts_mse.ci_low) + ',' +
           format_number(s.dts_mse.ci_high) + '\n';
  }
  return out;
}

std::string fidelity_plot_csv(const FidelityReport& report) {
  auto agents = report.first_seed;
  std::stable_sort(agents.begin(), agents.end(), [](const auto& a, const auto& b) {
    return a.true_mean < b.true_mean;
  });
  std::string out = "rank,agent_id,true_score,dts_score,pts_score\n";
  for (std::size_t r = 0; r < agents.size(); ++r) {
    out += std::to_string(r + 1) + ',' + agents[r].id + ',' + format_number(agents[r].true_mean) +
           ',' + format_number(agents[r].dts_mean) + ',' + format_number(agents[r].pts_mean) +
           '\n';
  }
  return out;
}

nlohmann::ordered_json fidelity_json(const FidelityReport& report) {
  auto num = [](double v) { return std::strtod(format_number(v).c_str(), nullptr); };
  nlohmann::ordered_json j;
  j["seeds"] = report.seeds.size();
  j["median_within_tolerance"] = num(report.median_within);
  j["min_within_tolerance"] = num(report.min_within);
  j["median_dts_rank"] = num(report.median_dts_rank);
  j["min_dts_rank"] = num(report.min_dts_rank);
  j["median_pts_rank"] = num(report.median_pts_rank);
  j["median_pts_avg_rank"] = num(report.median_pts_avg_rank);
  if (!report.seeds.empty()) {
    const auto& first = report.seeds.front().dts_mse;
    j["first_seed_mse"] = {{"mse", num(first.mse)},
                           {"ci_low", num(first.ci_low)},
                           {"ci_high", num(first.ci_high)}};
  }
  return j;
}

}  // namespace serum

// serum: simulate report datasets, estimate reference-pool error rates,
// score reports without ground truth, and run the benchmark suites.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "serum/bench.hpp"
#include "serum/data.hpp"
#include "serum/dts.hpp"
#include "serum/error.hpp"
#include "serum/parallel.hpp"
#include "serum/sim.hpp"

namespace fs = std::filesystem;
using namespace serum;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string reports;
  unsigned jobs = 0;
  std::string format = "csv";
};

void log(const std::string& msg) { std::cerr << "serum: " << msg << '\n'; }

RunConfig resolve(const Options& opt) {
  RunConfig c = load_config(opt.config);
  apply_environment(c);
  if (opt.seed) c.seed = *opt.seed;
  if (!opt.out.empty()) c.out_dir = opt.out;
  if (!opt.reports.empty()) c.reports_path = opt.reports;
  c.simulation.seed = c.seed;
  return c;
}

ReportTable read_reports(const RunConfig& c) {
  if (c.reports_path.empty()) {
    throw ValidationError("no report file: pass --reports or set paths.reports");
  }
  log("reading " + c.reports_path);
  return index_reports(load_reports(c.reports_path));
}

std::string ext(ScoreFormat f) { return f == ScoreFormat::csv ? ".csv" : ".json"; }

int cmd_simulate(const Options& opt) {
  const RunConfig c = resolve(opt);
  log("simulating " + std::to_string(c.simulation.agents) + " agents, " +
      std::to_string(c.simulation.tasks) + " tasks, seed " + std::to_string(c.seed));
  const Simulation sim = simulate(c.simulation);
  const fs::path out = c.out_dir;
  write_reports(out / "reports.csv", flatten_reports(sim.reports));

  std::string world = "task_id,ground_truth\n";
  for (const auto& task : sim.reports.tasks) world += task.id + ',' + std::to_string(*task.truth) + '\n';
  write_text(out / "world.csv", world);
  log("wrote reports.csv and world.csv to " + out.string());
  return 0;
}

int cmd_estimate(const Options& opt) {
  const RunConfig c = resolve(opt);
  const ScoreFormat format = parse_score_format(opt.format);
  const ReportTable reports = read_reports(c);
  const DtsConfig dts = c.dts_config(opt.jobs);

  std::vector<std::optional<EstimationResult>> results(reports.agent_count());
  std::vector<std::string> skipped(reports.agent_count());
  parallel_for(reports.agent_count(), opt.jobs, [&](std::size_t i) {
    try {
      results[i] = estimate_pool(reports, i, dts);
    } catch (const ValidationError& e) {
      skipped[i] = e.what();
    }
  });

  std::string text;
  if (format == ScoreFormat::json) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      nlohmann::ordered_json j;
      j["agent_id"] = reports.agent_ids[i];
      if (results[i]) {
        const auto est = estimation_json(*results[i]);
        for (auto& [k, v] : est.items()) j[k] = v;
      } else {
        j["informative"] = false;
        j["skipped"] = skipped[i];
      }
      doc.push_back(std::move(j));
    }
    text = doc.dump(2) + "\n";
  } else {
    text = "agent_id,e0_hat,e1_hat,p0_hat,informative,status,sample_count\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      text += reports.agent_ids[i] + ',';
      if (results[i]) {
        const auto& r = *results[i];
        text += format_number(r.rates.e0) + ',' + format_number(r.rates.e1) + ',' +
                (r.prior_recovered ? format_number(r.prior_recovered->p0) : std::string()) + ',' +
                (r.informative ? "true" : "false") + ',' + to_string(r.diagnostics.status) + ',' +
                std::to_string(r.diagnostics.sample_count) + '\n';
      } else {
        text += ",,,false,insufficient-data,0\n";
      }
    }
  }
  const fs::path path = fs::path(c.out_dir) / ("estimates" + ext(format));
  write_text(path, text);
  log("wrote " + path.string());
  return 0;
}

int cmd_score(const Options& opt) {
  const RunConfig c = resolve(opt);
  const ScoreFormat format = parse_score_format(opt.format);
  const ReportTable reports = read_reports(c);
  const ScoreTable scores = dts_run(reports, c.dts_config(opt.jobs));
  const fs::path out = c.out_dir;
  write_scores(scores, out / ("scores" + ext(format)), format);
  std::size_t informative = 0;
  for (const auto& a : scores.agents) informative += a.informative ? 1 : 0;
  log("scored " + std::to_string(scores.agents.size()) + " agents (" +
      std::to_string(informative) + " with an informative pool)");

  if (reports.has_truth()) {
    ScoringRule rule = c.scoring_rule();
    if (!c.prior_mode.known && rule.takes_signal()) {
      // No prior was given: bind signal rules to the labelled tasks' base rate.
      double ones = 0.0, labelled = 0.0;
      for (const auto& task : reports.tasks) {
        if (!task.truth) continue;
        ones += *task.truth;
        labelled += 1.0;
      }
      rule = rule.with_prior(Prior::from_p1(ones / labelled));
    }
    const ScoreTable truth = true_scores(reports, rule, c.elicitation);
    write_scores(truth, out / ("true_scores" + ext(format)), format);
    log("ground truth present: wrote true_scores" + ext(format));
  }
  return 0;
}

int cmd_bench(const Options& opt) {
  const RunConfig c = resolve(opt);
  const BenchSettings& b = c.bench;
  const fs::path out = c.out_dir;

  SweepOptions sweep;
  sweep.tasks = b.sweep_tasks;
  sweep.agents = b.sweep_agents;
  sweep.rates = b.sweep_rates;
  sweep.prior = c.simulation.prior;
  sweep.seeds = b.seeds;
  sweep.seed = c.seed;
  sweep.jobs = opt.jobs;
  log("consistency sweep: " + std::to_string(b.sweep_tasks.size() * b.sweep_agents.size()) +
      " cells x " + std::to_string(b.seeds) + " seeds");
  const auto cells = run_consistency_sweep(sweep);
  write_text(out / "sweep.csv", sweep_csv(cells));

  FidelityOptions fid;
  fid.agents = b.fidelity_agents;
  fid.tasks = b.fidelity_tasks;
  fid.seeds = b.fidelity_seeds;
  fid.tolerance = b.fidelity_tolerance;
  fid.seed = c.seed;
  fid.bootstrap = b.bootstrap;
  fid.simulation = c.simulation;
  fid.dts = c.dts_config(opt.jobs);
  log("fidelity: " + std::to_string(fid.seeds) + " seeds of " + std::to_string(fid.agents) +
      " agents x " + std::to_string(fid.tasks) + " tasks");
  const FidelityReport report = run_fidelity(fid);
  write_text(out / "fidelity_seeds.csv", fidelity_seeds_csv(report));
  write_text(out / "fidelity_plot.csv", fidelity_plot_csv(report));

  std::string bias = "pool_size,moment_bias,rate_bias\n";
  for (std::size_t n : {5, 10, 20, 50, 100, 200}) {
    const auto r =
        without_replacement_bias(n, b.sweep_rates.mean, b.sweep_rates.spread, c.simulation.prior);
    bias += std::to_string(n) + ',' + format_number(r.moments) + ',' + format_number(r.rates) + '\n';
  }
  write_text(out / "bias.csv", bias);

  nlohmann::ordered_json summary;
  summary["seed"] = c.seed;
  summary["fidelity"] = fidelity_json(report);
  summary["sweep"] = nlohmann::ordered_json::array();
  for (const auto& cell : cells) {
    summary["sweep"].push_back({{"agents", cell.agents},
                                {"tasks", cell.tasks},
                                {"known_median", std::stod(format_number(cell.known_median))},
                                {"one_bit_median", std::stod(format_number(cell.one_bit_median))}});
  }
  write_text(out / "summary.json", summary.dump(2) + "\n");
  log("wrote sweep.csv, bias.csv, fidelity_seeds.csv, fidelity_plot.csv, summary.json to " +
      out.string());
  return 0;
}

int cmd_dominance(const Options& opt) {
  const RunConfig c = resolve(opt);
  DominanceOptions d;
  d.prior = c.simulation.prior;
  d.kappa = c.kappa;
  const auto rows = run_dominance_grid(d);
  std::size_t strict = 0, weak = 0, violations = 0;
  for (const auto& r : rows) {
    strict += r.verdict == Verdict::strict;
    weak += r.verdict == Verdict::weak_zero;
    violations += r.verdict == Verdict::violation;
  }
  const fs::path out = c.out_dir;
  write_text(out / "dominance.csv", dominance_csv(rows));
  nlohmann::ordered_json summary{{"rows", rows.size()},
                                 {"strict", strict},
                                 {"weak_zero", weak},
                                 {"violations", violations}};
  write_text(out / "dominance_summary.json", summary.dump(2) + "\n");
  log(std::to_string(rows.size()) + " comparisons: " + std::to_string(strict) + " strict, " +
      std::to_string(weak) + " weak-zero, " + std::to_string(violations) + " violations");
  return violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scores binary reports without ground truth by noise-corrected comparison with peers."};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool reads_reports, bool formats) {
    sub->add_option("--config", opt.config, "JSON run configuration")->required();
    sub->add_option("--seed", opt.seed, "master seed (overrides config and SERUM_SEED)");
    sub->add_option("--out", opt.out, "output directory (overrides config and SERUM_OUT)");
    sub->add_option("--jobs", opt.jobs, "worker threads, 0 = all cores (results do not depend on it)");
    if (reads_reports) sub->add_option("--reports", opt.reports, "report CSV to read");
    if (formats) {
      sub->add_option("--format", opt.format, "output format")
          ->check(CLI::IsMember({"csv", "json"}));
    }
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "write a synthetic report dataset");
  add_common(simulate_cmd, false, false);
  auto* estimate_cmd = app.add_subcommand("estimate", "estimate each agent's reference-pool error rates");
  add_common(estimate_cmd, true, true);
  auto* score_cmd = app.add_subcommand("score", "score every agent with the mechanism");
  add_common(score_cmd, true, true);
  auto* bench_cmd = app.add_subcommand("bench", "consistency sweep and score fidelity benchmark");
  add_common(bench_cmd, false, false);
  auto* dominance_cmd = app.add_subcommand("dominance", "analytic dominance grid");
  add_common(dominance_cmd, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0 && e.get_name() == "RequiredError") std::cerr << config_schema_hint() << '\n';
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(opt);
    if (*estimate_cmd) return cmd_estimate(opt);
    if (*score_cmd) return cmd_score(opt);
    if (*bench_cmd) return cmd_bench(opt);
    if (*dominance_cmd) return cmd_dominance(opt);
  } catch (const ValidationError& e) {
    std::cerr << "serum: error: " << e.what() << "\n\n" << config_schema_hint() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "serum: error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

#pragma once

// Experiment harness: agreement between mechanism scores and true scores,
// the peer-agreement baseline, estimator consistency sweeps and the
// analytic dominance grid.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "serum/data.hpp"
#include "serum/dts.hpp"

namespace serum {

struct MseResult {
  double mse = 0.0;
  double ci_low = 0.0;   // 2.5% bootstrap quantile
  double ci_high = 0.0;  // 97.5% bootstrap quantile
};

/// Mean squared difference over agents, with a percentile bootstrap CI over
/// resampled agents. Throws ValidationError on length mismatch or empty input.
MseResult mse(const std::vector<double>& est, const std::vector<double>& truth,
              std::size_t resamples = 1000, std::uint64_t seed = 1);

/// Spearman correlation with average ranks for ties. nullopt when either
/// vector is constant. Throws ValidationError on mismatch or fewer than 2 points.
std::optional<double> rank_correlation(const std::vector<double>& est,
                                       const std::vector<double>& truth);

/// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values);

/// Peer-agreement baseline 1(a = z) / R(a), R the frequency of answer a
/// over every binary answer in the dataset. References follow `mode` exactly
/// as the mechanism does. Per-agent means over answered tasks.
std::vector<double> pts_baseline(const ReportTable& reports, std::uint64_t seed,
                                 ReferenceMode mode = ReferenceMode::average_peers);

// ---------------------------------------------------------------------------

struct SweepCell {
  std::size_t agents = 0;
  std::size_t tasks = 0;
  // Per-seed error: mean over agents of max(|e0_hat - e0z|, |e1_hat - e1z|).
  double known_median = 0.0, known_q1 = 0.0, known_q3 = 0.0;
  double one_bit_median = 0.0, one_bit_q1 = 0.0, one_bit_q3 = 0.0;
  std::size_t seeds = 0;
};

struct SweepOptions {
  std::vector<std::size_t> tasks{500, 2000, 8000, 32000};
  std::vector<std::size_t> agents{50};
  RateModel rates{RateModel::Kind::jitter, 0.05, 0.45, ErrorRates{0.2, 0.3}, 0.1, false};
  Prior prior{0.4, 0.6};
  std::size_t seeds = 50;
  std::uint64_t seed = 1;
  unsigned jobs = 0;
};

/// Leave-one-out errors use the symmetric moment estimator.
std::vector<SweepCell> run_consistency_sweep(const SweepOptions& options);

/// Largest solver error over agents when the exact pooled moments of the
/// leave-one-out pool are fed in directly. Both solvers; should be round-off.
double exact_moment_error(const std::vector<AgentParams>& agents, const Prior& prior);

struct ReplacementBias {
  double moments = 0.0;  // max_k |c_k - c_k(mean rates)|
  double rates = 0.0;    // max(|e0_hat - e0z|, |e1_hat - e1z|), one-bit solver
};

/// Infinite-data bias from drawing three distinct references without
/// replacement from a pool of `pool_size` agents whose rates are spread
/// evenly over mean +- spread. Exact expectations, no sampling.
ReplacementBias without_replacement_bias(std::size_t pool_size, const ErrorRates& mean,
                                         double spread, const Prior& prior);

// ---------------------------------------------------------------------------

enum class Verdict { strict, weak_zero, violation };
const char* to_string(Verdict v);

struct DominanceRow {
  std::string profile;     // others' behaviour
  std::string rule;
  std::string agent;       // agent i's rates
  std::string deviation;
  bool pool_informative = false;
  double truthful = 0.0;
  double deviant = 0.0;
  double margin = 0.0;
  Verdict verdict = Verdict::strict;
};

struct DominanceOptions {
  Prior prior{0.4, 0.6};
  double kappa = 0.05;
  double threshold = 1e-6;
};

std::vector<DominanceRow> run_dominance_grid(const DominanceOptions& options);

// ---------------------------------------------------------------------------

struct FidelityAgent {
  std::string id;
  double true_mean = 0.0;
  double dts_mean = 0.0;
  double pts_mean = 0.0;
};

struct FidelitySeed {
  std::uint64_t seed = 0;
  double within_tolerance = 0.0;  // fraction of agents with |dts - true| <= tol
  std::optional<double> dts_rank;
  std::optional<double> pts_rank;      // baseline against one random peer
  std::optional<double> pts_avg_rank;  // baseline averaged over every peer
  MseResult dts_mse;
};

struct FidelityOptions {
  std::size_t agents = 50;
  std::size_t tasks = 20000;
  std::size_t seeds = 20;
  double tolerance = 0.02;
  std::uint64_t seed = 1;
  std::size_t bootstrap = 1000;
  SimConfig simulation;  // agents, tasks and seed are overwritten
  DtsConfig dts;         // seed and jobs follow the run
};

struct FidelityReport {
  std::vector<FidelitySeed> seeds;
  std::vector<FidelityAgent> first_seed;  // per-agent means of the first seed
  double median_within = 0.0, min_within = 0.0;
  double median_dts_rank = 0.0, min_dts_rank = 0.0;
  double median_pts_rank = 0.0;
  double median_pts_avg_rank = 0.0;
};

/// Simulates `seeds` datasets and compares DTS and the baseline against true
/// scores under the mechanism's own rule.
FidelityReport run_fidelity(const FidelityOptions& options);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);

// Serialization --------------------------------------------------------------

std::string sweep_csv(const std::vector<SweepCell>& cells);
std::string dominance_csv(const std::vector<DominanceRow>& rows);
std::string fidelity_seeds_csv(const FidelityReport& report);
/// Long format: one row per agent ordered by true score, for plotting.
std::string fidelity_plot_csv(const FidelityReport& report);
nlohmann::ordered_json fidelity_json(const FidelityReport& report);

}  // namespace serum

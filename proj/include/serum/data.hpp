#pragma once

// Report datasets, score tables and run configuration on disk.
//
// Report CSV (UTF-8, LF or CRLF line endings), header exactly
//   task_id,agent_id,signal,prediction,ground_truth
// signal and ground_truth are 0/1, prediction is a probability in [0, 1];
// absent optionals are empty cells. Every row carries a signal or a prediction.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "serum/dts.hpp"
#include "serum/score_table.hpp"
#include "serum/sim.hpp"
#include "serum/types.hpp"

namespace serum {

struct ReportRecord {
  std::string task_id;
  std::string agent_id;
  std::optional<int> signal;
  std::optional<double> prediction;
  std::optional<int> ground_truth;

  friend bool operator==(const ReportRecord&, const ReportRecord&) = default;
};

inline constexpr const char* kReportHeader = "task_id,agent_id,signal,prediction,ground_truth";
inline constexpr const char* kScoreHeader = "agent_id,n_tasks,mean_score,informative,e0_hat,e1_hat";

/// Parses a report CSV. All row problems are collected and thrown together
/// as one ValidationError citing line numbers.
std::vector<ReportRecord> parse_reports(std::istream& in, const std::string& source = "<input>");
std::vector<ReportRecord> load_reports(const std::filesystem::path& path);

void write_reports(std::ostream& out, const std::vector<ReportRecord>& records);
void write_reports(const std::filesystem::path& path, const std::vector<ReportRecord>& records);

/// Groups records by task, keeping first-appearance order of tasks and agents.
/// Throws ValidationError if a task carries conflicting ground truths.
ReportTable index_reports(const std::vector<ReportRecord>& records);
std::vector<ReportRecord> flatten_reports(const ReportTable& table);

/// Formats a double with 10 significant digits.
std::string format_number(double value);

enum class ScoreFormat { csv, json };
ScoreFormat parse_score_format(const std::string& s);

std::string scores_csv(const ScoreTable& table);
nlohmann::ordered_json scores_json(const ScoreTable& table);
nlohmann::ordered_json estimation_json(const EstimationResult& est);
void write_scores(const ScoreTable& table, const std::filesystem::path& path, ScoreFormat format);

/// One parsed row of a score CSV.
struct ScoreRow {
  std::string agent_id;
  std::size_t n_tasks = 0;
  double mean_score = 0.0;
  bool informative = false;
  std::optional<double> e0_hat;
  std::optional<double> e1_hat;
};

std::vector<ScoreRow> parse_scores_csv(std::istream& in);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);

struct BenchSettings {
  std::size_t seeds = 50;
  std::vector<std::size_t> sweep_tasks{500, 2000, 8000, 32000};
  std::vector<std::size_t> sweep_agents{50};
  RateModel sweep_rates{RateModel::Kind::jitter, 0.05, 0.45, ErrorRates{0.2, 0.3}, 0.1, false};
  std::size_t bootstrap = 1000;
  std::size_t fidelity_seeds = 20;
  std::size_t fidelity_agents = 50;
  std::size_t fidelity_tasks = 20000;
  double fidelity_tolerance = 0.02;
};

struct RunConfig {
  Elicitation elicitation = Elicitation::signal;
  RuleKind rule = RuleKind::one_over_prior;
  double log_clamp = ScoringRule::kDefaultLogClamp;
  PriorMode prior_mode = PriorMode::known_prior(Prior{0.4, 0.6});
  std::optional<ErrorRates> reporter_rates;  // posterior-signal rule only
  double kappa = 0.05;
  std::size_t min_tasks = kDefaultMinTasks;
  std::uint64_t seed = 1;
  ReferenceMode reference = ReferenceMode::average_peers;
  MomentEstimator estimator = MomentEstimator::symmetric;
  SimConfig simulation;
  BenchSettings bench;
  std::string reports_path;
  std::string out_dir = "out";

  /// The scoring rule this config names. Signal rules are bound to the
  /// known prior, or to a placeholder replaced by the recovered prior.
  ScoringRule scoring_rule() const;
  DtsConfig dts_config(unsigned jobs) const;
};

/// Validates and defaults a config document. Unknown keys, type mismatches
/// and out-of-range values throw ValidationError naming the offending key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Applies SERUM_SEED and SERUM_OUT from the environment, if set.
void apply_environment(RunConfig& config);

/// Short description of the config schema, printed on validation errors.
const char* config_schema_hint();

}  // namespace serum

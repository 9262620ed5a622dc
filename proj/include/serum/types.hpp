#pragma once

// Core value types shared by every module: priors, binary channels,
// reports and the indexed report table the mechanism operates on.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace serum {

/// Marginal distribution of the ground truth over the task set.
struct Prior {
  double p0 = 0.5;  // Pr[y = 0]
  double p1 = 0.5;  // Pr[y = 1]

  /// Builds a prior from Pr[y = 1]; throws ValidationError unless 0 < p1 < 1.
  static Prior from_p1(double p1);
  /// Checks p0 + p1 = 1 and 0 < p0 < 1.
  static Prior make(double p0, double p1);

  double mass(int outcome) const { return outcome == 1 ? p1 : p0; }
  bool near_uniform(double tol) const { return p0 - p1 <= tol && p1 - p0 <= tol; }
};

/// Binary channel from the ground truth to an observation or report.
///   e1 = Pr[obs = 0 | y = 1],  e0 = Pr[obs = 1 | y = 0]
struct ErrorRates {
  double e1 = 0.0;
  double e0 = 0.0;

  static ErrorRates make(double e1, double e0);

  /// Error rate of the class `outcome`: e_{outcome}.
  double of(int outcome) const { return outcome == 1 ? e1 : e0; }
  /// 1 - e1 - e0; zero exactly when the observation is independent of y.
  double margin() const { return 1.0 - e1 - e0; }
  /// Stochastic relevance: e1 + e0 != 1.
  bool informative() const { return margin() != 0.0; }
  /// Pr[obs = 1 | y].
  double prob_one(int y) const { return y == 1 ? 1.0 - e1 : e0; }

  friend bool operator==(const ErrorRates&, const ErrorRates&) = default;
};

struct Signal {
  int value = 0;
  friend bool operator==(const Signal&, const Signal&) = default;
};

struct Prediction {
  double value = 0.5;
  friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// One agent's answer on one task.
using Report = std::variant<Signal, Prediction>;

enum class Elicitation { signal, prediction };

const char* to_string(Elicitation e);
Elicitation parse_elicitation(const std::string& s);

/// Throws ValidationError unless value is 0 or 1.
int check_binary(int value, const char* what);
/// Throws ValidationError unless value lies in [0, 1].
double check_unit(double value, const char* what);

/// One agent's entry on a task inside a ReportTable.
struct Response {
  std::size_t agent = 0;
  std::optional<int> signal;
  std::optional<double> prediction;
};

struct Task {
  std::string id;
  std::vector<Response> responses;
  std::optional<int> truth;

  const Response* find(std::size_t agent) const;
};

/// Reports indexed by task and agent. Agent and task ids are kept in
/// first-appearance order so every derived table is deterministic.
struct ReportTable {
  std::vector<std::string> agent_ids;
  std::vector<Task> tasks;

  std::size_t agent_count() const { return agent_ids.size(); }
  bool has_truth() const;
};

/// Pulls the report of the requested elicitation type out of a response;
/// throws ValidationError when the field is missing.
Report report_of(const Response& r, Elicitation e);

}  // namespace serum

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "serum/moments.hpp"

namespace serum {

struct TaskScore {
  std::size_t task = 0;
  std::size_t agent = 0;
  double value = 0.0;
  bool informative = true;  // false: zero because the reference pool was uninformative
};

struct AgentSummary {
  std::string id;
  std::size_t n_tasks = 0;
  double mean_score = 0.0;
  bool scored = true;       // false: too little leave-one-out data to estimate
  bool informative = true;
  std::optional<EstimationResult> estimation;
};

/// Per-(agent, task) scores plus per-agent means. Entries are ordered by
/// task, then by the agent's position on the task.
struct ScoreTable {
  std::vector<std::string> task_ids;
  std::vector<AgentSummary> agents;
  std::vector<TaskScore> entries;

  std::vector<double> means() const {
    std::vector<double> out;
    out.reserve(agents.size());
    for (const auto& a : agents) out.push_back(a.mean_score);
    return out;
  }
};

}  // namespace serum

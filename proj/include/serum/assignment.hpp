#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace serum {

/// Which three agents work on each task. members[k] holds distinct agent
/// indices; load[i] is agent i's task count n_i.
struct Assignment {
  std::vector<std::array<std::size_t, 3>> members;
  std::vector<std::size_t> load;

  std::size_t task_count() const { return members.size(); }
  std::size_t agent_count() const { return load.size(); }
};

}  // namespace serum

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hive/ckg.hpp"

namespace hive::selection {

// User-supplied deployment constraints applied before ranking.
struct Constraints {
  // Accepted license local names (case-insensitive).  Empty = unconstrained.
  std::vector<std::string> license_whitelist;
  // Prefer the smallest model.  Takes priority over benchmark ranking.
  bool minimize_size = false;
  // Rank by best reported value on this benchmark/metric pair
  // (case-insensitive match, direction-aware comparison).
  std::optional<std::string> benchmark;
  std::optional<std::string> metric;
};

// Why the winner won; one record per assigned task.
struct RationaleRecord {
  std::size_t candidates_considered = 0;
  std::vector<std::string> filters_applied;
  std::string ranking_rule;  // "min_size" | "benchmark:<b>/<m>" | "most_results"
  std::optional<double> winning_value;
};

struct Assignment {
  std::string task;
  std::optional<ckg::NodeId> model;  // nullopt when unassigned
  std::string reason;                // "UnknownTask" | "NoCompliantModel" | ""
  RationaleRecord rationale;
};

struct SelectionResult {
  std::vector<Assignment> assignments;  // one per requested task, input order
  bool complete() const;
  const Assignment* find(const std::string& task) const;
};

// Assigns one model per task: filter on hard constraints (a model missing a
// constrained attribute is excluded), then rank the survivors.  Ties break on
// ascending model local name.
SelectionResult select_models(const ckg::CapabilityGraph& graph,
                              const std::vector<std::string>& tasks,
                              const Constraints& constraints);

}  // namespace hive::selection

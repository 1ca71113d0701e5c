#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hive/pddl.hpp"

namespace hive::planner {

struct SearchConfig {
  int max_width = 2;  // 1 or 2
  std::uint64_t max_expansions = 1'000'000;
};

struct PlanStep {
  std::size_t action_index = 0;  // into GroundedTask::actions
  std::string schema_name;
  std::vector<std::string> args;
  std::vector<std::string> produces;
  std::string name() const;
};

struct Plan {
  std::vector<PlanStep> steps;
  std::size_t length() const { return steps.size(); }
};

// Seen-tuple table for novelty width 1..2. evaluate_and_update returns the
// smallest k <= max_width such that the state holds a never-seen k-tuple of
// true atoms (max_width+1 when there is none) and marks all the state's
// tuples of size <= max_width as seen. Re-evaluating the identical state
// therefore yields max_width+1.
class NoveltyTable {
 public:
  NoveltyTable(std::size_t n_atoms, int max_width);
  int evaluate_and_update(const pddl::Bits& state);
  int max_width() const { return width_; }

 private:
  std::size_t pair_index(std::size_t i, std::size_t j) const;
  std::size_t n_;
  int width_;
  pddl::Bits seen1_;
  pddl::Bits seen2_;
};

// Best-first width search. Keys: (novelty asc, unsatisfied goal count asc,
// path cost asc), FIFO on full ties. States with novelty above max_width are
// pruned; goal states are recognized at generation and never pruned. Returns
// the first goal-satisfying plan found (valid, not necessarily shortest).
// Throws NoPlanFound / BudgetExceeded.
Plan bfws_plan(const pddl::GroundedTask& task, const SearchConfig& cfg = {});

bool validate_plan(const pddl::GroundedTask& task, const Plan& p);

// Exhaustive breadth-first baseline for tests; shortest plan or nullopt.
// Refuses tasks above desk scale (ScaleGuard beyond 2000 ground actions).
std::optional<Plan> bfs_oracle(const pddl::GroundedTask& task);

}  // namespace hive::planner

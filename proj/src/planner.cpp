#include "hive/planner.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <set>

#include "hive/errors.hpp"

namespace hive::planner {

std::string PlanStep::name() const {
  std::string s = schema_name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + args[i];
  return s + ")";
}

NoveltyTable::NoveltyTable(std::size_t n_atoms, int max_width)
    : n_(n_atoms), width_(max_width) {
  if (max_width < 1 || max_width > 2)
    throw Error("novelty width must be 1 or 2, got " + std::to_string(max_width));
  seen1_.resize(n_);
  if (width_ >= 2 && n_ >= 2) seen2_.resize(n_ * (n_ - 1) / 2);
}

std::size_t NoveltyTable::pair_index(std::size_t i, std::size_t j) const {
  // i < j; row-major upper triangle
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

int NoveltyTable::evaluate_and_update(const pddl::Bits& state) {
  std::vector<std::size_t> on;
  for (std::size_t i = state.find_first(); i != pddl::Bits::npos;
       i = state.find_next(i))
    on.push_back(i);
  bool new1 = false, new2 = false;
  for (std::size_t i : on) {
    if (!seen1_.test(i)) {
      seen1_.set(i);
      new1 = true;
    }
  }
  if (width_ >= 2) {
    for (std::size_t a = 0; a < on.size(); ++a) {
      for (std::size_t b = a + 1; b < on.size(); ++b) {
        std::size_t p = pair_index(on[a], on[b]);
        if (!seen2_.test(p)) {
          seen2_.set(p);
          new2 = true;
        }
      }
    }
  }
  if (new1) return 1;
  if (new2) return 2;
  return width_ + 1;
}

namespace {

struct Node {
  pddl::Bits state;
  std::int64_t parent;  // -1 for root
  std::size_t action;   // action applied to reach this node
  std::uint64_t cost;
};

struct QueueEntry {
  int novelty;
  std::size_t unsat;
  std::uint64_t cost;
  std::uint64_t seq;  // FIFO tie-break
  std::size_t node;
};

struct EntryGreater {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.novelty != b.novelty) return a.novelty > b.novelty;
    if (a.unsat != b.unsat) return a.unsat > b.unsat;
    if (a.cost != b.cost) return a.cost > b.cost;
    return a.seq > b.seq;
  }
};

bool subset(const pddl::Bits& needle, const pddl::Bits& haystack) {
  return (needle & ~haystack).none();
}

Plan extract(const pddl::GroundedTask& task, const std::vector<Node>& nodes,
             std::int64_t leaf, std::optional<std::size_t> extra_action) {
  std::vector<std::size_t> actions;
  if (extra_action) actions.push_back(*extra_action);
  for (std::int64_t i = leaf; i > 0; i = nodes[i].parent)  // node 0 is the root
    actions.push_back(nodes[i].action);
  std::reverse(actions.begin(), actions.end());
  Plan plan;
  for (std::size_t ai : actions) {
    const pddl::GroundAction& a = task.actions[ai];
    plan.steps.push_back({ai, a.schema_name, a.args, a.produces});
  }
  return plan;
}

}  // namespace

Plan bfws_plan(const pddl::GroundedTask& task, const SearchConfig& cfg) {
  if (subset(task.goal, task.init)) return {};

  NoveltyTable table(task.atoms.size(), cfg.max_width);
  std::vector<Node> nodes;
  nodes.push_back({task.init, -1, 0, 0});
  table.evaluate_and_update(task.init);  // root is never pruned

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, EntryGreater> open;
  std::uint64_t seq = 0;
  open.push({1, (task.goal & ~task.init).count(), 0, seq++, 0});

  std::uint64_t expansions = 0;
  while (!open.empty()) {
    QueueEntry e = open.top();
    open.pop();
    if (++expansions > cfg.max_expansions) throw BudgetExceeded(expansions - 1);
    const pddl::Bits state = nodes[e.node].state;
    for (std::size_t ai = 0; ai < task.actions.size(); ++ai) {
      const pddl::GroundAction& act = task.actions[ai];
      if (!subset(act.pre, state)) continue;
      pddl::Bits succ = (state & ~act.del) | act.add;
      if (subset(task.goal, succ))
        return extract(task, nodes, static_cast<std::int64_t>(e.node), ai);
      int nov = table.evaluate_and_update(succ);
      if (nov > cfg.max_width) continue;  // prune
      nodes.push_back({succ, static_cast<std::int64_t>(e.node), ai, e.cost + 1});
      open.push({nov, (task.goal & ~succ).count(), e.cost + 1, seq++,
                 nodes.size() - 1});
    }
  }
  throw NoPlanFound("open list exhausted after " + std::to_string(expansions) +
                    " expansions");
}

bool validate_plan(const pddl::GroundedTask& task, const Plan& p) {
  pddl::Bits state = task.init;
  for (const PlanStep& step : p.steps) {
    if (step.action_index >= task.actions.size()) return false;
    const pddl::GroundAction& a = task.actions[step.action_index];
    if (a.schema_name != step.schema_name) return false;
    if (!subset(a.pre, state)) return false;
    state = (state & ~a.del) | a.add;
  }
  return subset(task.goal, state);
}

std::optional<Plan> bfs_oracle(const pddl::GroundedTask& task) {
  constexpr std::size_t kMaxActions = 2000;
  if (task.actions.size() > kMaxActions)
    throw ScaleGuard("bfs_oracle refuses " + std::to_string(task.actions.size()) +
                     " ground actions (cap " + std::to_string(kMaxActions) + ")");
  if (subset(task.goal, task.init)) return Plan{};

  std::vector<Node> nodes;
  nodes.push_back({task.init, -1, 0, 0});
  std::set<pddl::Bits> visited{task.init};
  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    std::size_t cur = frontier.front();
    frontier.pop_front();
    const pddl::Bits state = nodes[cur].state;
    for (std::size_t ai = 0; ai < task.actions.size(); ++ai) {
      const pddl::GroundAction& act = task.actions[ai];
      if (!subset(act.pre, state)) continue;
      pddl::Bits succ = (state & ~act.del) | act.add;
      if (visited.count(succ)) continue;
      if (subset(task.goal, succ))
        return extract(task, nodes, static_cast<std::int64_t>(cur), ai);
      visited.insert(succ);
      nodes.push_back({succ, static_cast<std::int64_t>(cur), ai, nodes[cur].cost + 1});
      frontier.push_back(nodes.size() - 1);
    }
  }
  return std::nullopt;
}

}  // namespace hive::planner

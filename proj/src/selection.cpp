#include "hive/selection.hpp"

#include <algorithm>
#include <set>

#include "hive/util.hpp"

namespace hive::selection {

bool SelectionResult::complete() const {
  return std::all_of(assignments.begin(), assignments.end(),
                     [](const Assignment& a) { return a.model.has_value(); });
}

const Assignment* SelectionResult::find(const std::string& task) const {
  for (const Assignment& a : assignments)
    if (a.task == task) return &a;
  return nullptr;
}

namespace {

struct Candidate {
  ckg::ModelRecord record;
  double key = 0.0;  // meaning depends on the active ranking rule
};

// Best reported value for a benchmark/metric pair; "best" honours the
// direction stored on each result (case-insensitive name match).
std::optional<double> best_result(const ckg::ModelRecord& rec,
                                  const std::string& benchmark,
                                  const std::string& metric) {
  std::optional<double> best;
  for (const ckg::BenchmarkResult& r : rec.results) {
    if (!util::equals_ci(r.benchmark.local_name, benchmark)) continue;
    if (!util::equals_ci(r.metric.local_name, metric)) continue;
    bool better = !best || (r.direction == ckg::Direction::HigherBetter
                                ? r.value > *best
                                : r.value < *best);
    if (better) best = r.value;
  }
  return best;
}

}  // namespace

SelectionResult select_models(const ckg::CapabilityGraph& graph,
                              const std::vector<std::string>& tasks,
                              const Constraints& constraints) {
  SelectionResult result;
  std::set<std::string> whitelist;
  for (const std::string& l : constraints.license_whitelist)
    whitelist.insert(util::to_lower(l));

  for (const std::string& task : tasks) {
    Assignment a;
    a.task = task;
    ckg::NodeId task_node{ckg::NodeKind::Task, task};
    if (!graph.contains_entity(task_node)) {
      a.reason = "UnknownTask";
      result.assignments.push_back(std::move(a));
      continue;
    }

    std::vector<Candidate> pool;
    for (ckg::ModelRecord& rec : graph.models_for_task(task_node))
      pool.push_back({std::move(rec), 0.0});
    a.rationale.candidates_considered = pool.size();

    if (!whitelist.empty()) {
      a.rationale.filters_applied.push_back("license_whitelist");
      std::erase_if(pool, [&](const Candidate& c) {
        return !c.record.license ||
               !whitelist.count(util::to_lower(*c.record.license));
      });
    }

    if (constraints.minimize_size) {
      a.rationale.ranking_rule = "min_size";
      a.rationale.filters_applied.push_back("requires_size");
      std::erase_if(pool,
                    [](const Candidate& c) { return !c.record.size_bytes; });
      for (Candidate& c : pool)
        c.key = static_cast<double>(*c.record.size_bytes);
      std::sort(pool.begin(), pool.end(),
                [](const Candidate& x, const Candidate& y) {
                  if (x.key != y.key) return x.key < y.key;
                  return x.record.model.local_name < y.record.model.local_name;
                });
    } else if (constraints.benchmark && constraints.metric) {
      a.rationale.ranking_rule =
          "benchmark:" + *constraints.benchmark + "/" + *constraints.metric;
      a.rationale.filters_applied.push_back("requires_result");
      ckg::Direction dir = ckg::metric_direction(*constraints.metric);
      std::erase_if(pool, [&](Candidate& c) {
        auto v = best_result(c.record, *constraints.benchmark, *constraints.metric);
        if (!v) return true;
        c.key = *v;
        return false;
      });
      std::sort(pool.begin(), pool.end(),
                [dir](const Candidate& x, const Candidate& y) {
                  if (x.key != y.key)
                    return dir == ckg::Direction::HigherBetter ? x.key > y.key
                                                               : x.key < y.key;
                  return x.record.model.local_name < y.record.model.local_name;
                });
    } else {
      a.rationale.ranking_rule = "most_results";
      for (Candidate& c : pool)
        c.key = static_cast<double>(c.record.results.size());
      std::sort(pool.begin(), pool.end(),
                [](const Candidate& x, const Candidate& y) {
                  if (x.key != y.key) return x.key > y.key;
                  return x.record.model.local_name < y.record.model.local_name;
                });
    }

    if (pool.empty()) {
      a.reason = "NoCompliantModel";
    } else {
      a.model = pool.front().record.model;
      a.rationale.winning_value = pool.front().key;
    }
    result.assignments.push_back(std::move(a));
  }
  return result;
}

}  // namespace hive::selection

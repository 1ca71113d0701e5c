#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hive/ckg.hpp"
#include "hive/config.hpp"
#include "hive/evalbench.hpp"
#include "hive/exec.hpp"
#include "hive/nlu.hpp"
#include "hive/pddl.hpp"
#include "hive/planner.hpp"
#include "hive/prompts.hpp"
#include "hive/provider.hpp"
#include "hive/selection.hpp"

namespace hive::pipeline {

// Result of the planning half of the pipeline (no execution). `stage` marks
// the last milestone reached, so a caller that passes a progress pointer can
// tell which stage an exception interrupted.
struct PlanResult {
  enum class Stage { None, Parsed, Classified, ActionsChosen, Planned, Selected };

  Stage stage = Stage::None;
  std::string query;
  nlu::ParsedQuery parsed;
  nlu::DomainSubset domains;
  std::vector<std::string> actions;  // chosen actions, reply order
  planner::Plan plan;
  selection::SelectionResult selection;
  std::int64_t t_parse_ms = 0;
  std::int64_t t_plan_ms = 0;
  std::int64_t t_select_ms = 0;
  bool empty = false;  // no domain matched; nothing to plan
};

// Owns every loaded component: graph, parsed domain files, prompt templates,
// provider, execution specs and backends. Member functions are
// thread-compatible when the provider and backends are (the offline fixture
// provider and the stub backends are), which is what eval --jobs relies on.
class Engine {
 public:
  explicit Engine(const config::Config& cfg);  // throws on missing inputs

  // parse -> classify -> merge -> choose actions -> synthesize -> ground ->
  // search -> select models. Models are selected for the plan's schema names
  // (first-occurrence order), so intermediate actions the planner pulled in
  // are covered too. Throws on stage failures; with `progress` given, fields
  // reached before the throw are preserved there.
  PlanResult plan_query(const std::string& query,
                        const selection::Constraints& constraints,
                        exec::Clock& clock, PlanResult* progress = nullptr);

  // Executes a finished PlanResult; never throws. An empty PlanResult yields
  // an Ok trace with no steps.
  exec::ExecutionTrace execute(const PlanResult& pr, exec::Clock& clock);

  // One bench record on an isolated virtual clock. Stage failures collapse
  // into Err markers instead of propagating.
  evalbench::RunOutcome run_record(const evalbench::BenchRecord& rec);

  const config::Config& cfg() const { return cfg_; }
  const ckg::CapabilityGraph& graph() const { return graph_; }
  const std::vector<std::string>& domain_names() const { return domain_names_; }
  const std::map<std::string, pddl::DomainFile>& domains() const { return domains_; }
  const prompts::PromptLibrary& prompt_library() const { return prompts_; }
  provider::TextCompletion& completion() { return *provider_; }
  const exec::SpecStore& specs() const { return specs_; }
  exec::BackendRegistry& registry() { return registry_; }

 private:
  config::Config cfg_;
  ckg::CapabilityGraph graph_;
  std::vector<std::string> domain_names_;  // sorted by file name
  std::map<std::string, pddl::DomainFile> domains_;
  prompts::PromptLibrary prompts_;
  std::unique_ptr<provider::TextCompletion> provider_;
  exec::SpecStore specs_;
  exec::BackendRegistry registry_;
};

}  // namespace hive::pipeline

#include "hive/pipeline.hpp"

#include <algorithm>
#include <filesystem>

#include "hive/errors.hpp"
#include "hive/util.hpp"

namespace hive::pipeline {

namespace fs = std::filesystem;

namespace {

std::unique_ptr<provider::TextCompletion> make_provider(const config::Config& cfg) {
  if (cfg.provider.offline) {
    if (!fs::is_directory(cfg.provider.fixtures))
      throw Error("offline mode: provider fixtures directory not found: " +
                  cfg.provider.fixtures);
    return std::make_unique<provider::FixtureProvider>(cfg.provider.fixtures);
  }
  if (cfg.provider.url.empty()) throw Error("online mode requires provider.url");
  return std::make_unique<provider::HttpProvider>(cfg.provider.url, cfg.provider.token);
}

}  // namespace

Engine::Engine(const config::Config& cfg)
    : cfg_(cfg),
      graph_(ckg::load_graph_file(cfg.ckg.path)),
      prompts_(cfg.prompts_dir),
      provider_(make_provider(cfg)),
      specs_(exec::SpecStore::load(cfg.ckg.specs)),
      registry_(exec::BackendRegistry::load(cfg.registry.path)) {
  if (!fs::is_directory(cfg_.domains_dir))
    throw Error("domain directory not found: " + cfg_.domains_dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(cfg_.domains_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pddl")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) {
    pddl::DomainFile d = pddl::parse_domain(util::read_file(f.string()));
    if (domains_.count(d.name))
      throw Error("duplicate domain name '" + d.name + "' in " + f.string());
    domain_names_.push_back(d.name);
    domains_.emplace(d.name, std::move(d));
  }
  if (domains_.empty()) throw Error("no .pddl domain files in " + cfg_.domains_dir);
}

PlanResult Engine::plan_query(const std::string& query,
                              const selection::Constraints& constraints,
                              exec::Clock& clock, PlanResult* progress) {
  PlanResult local;
  PlanResult& r = progress ? *progress : local;
  r = PlanResult{};
  r.query = query;

  const std::int64_t t0 = clock.now_ms();  // query receipt
  r.parsed = nlu::parse_query(query, *provider_, prompts_);
  const std::int64_t t1 = clock.now_ms();
  r.t_parse_ms = t1 - t0;
  r.stage = PlanResult::Stage::Parsed;

  const std::string instruction = r.parsed.instruction.value_or(query);
  r.domains = nlu::classify_domains(instruction, domain_names_, *provider_, prompts_);
  r.stage = PlanResult::Stage::Classified;

  if (r.domains.domains.empty()) {
    // Nothing matched (e.g. a greeting): an empty but well-formed result.
    r.empty = true;
    r.actions.clear();
    const std::int64_t t2 = clock.now_ms();
    r.t_plan_ms = t2 - t1;
    r.stage = PlanResult::Stage::Planned;
    const std::int64_t t3 = clock.now_ms();
    r.t_select_ms = t3 - t0;
    r.stage = PlanResult::Stage::Selected;
    return r;
  }

  std::vector<pddl::DomainFile> chosen;
  for (const std::string& name : r.domains.domains) chosen.push_back(domains_.at(name));
  pddl::DomainFile merged = pddl::merge_domains(chosen);
  pddl::add_done_markers(merged);

  std::vector<std::string> offered;
  for (const pddl::ActionSchema& a : merged.actions) offered.push_back(a.name);
  r.actions = nlu::select_actions(instruction, offered, *provider_, prompts_);
  r.stage = PlanResult::Stage::ActionsChosen;

  pddl::ProblemFile problem = pddl::synthesize_problem(r.parsed, r.actions, merged);
  pddl::GroundedTask task = pddl::ground(merged, problem, cfg_.ground.max_actions);
  planner::SearchConfig scfg;
  scfg.max_width = cfg_.planner.max_width;
  scfg.max_expansions = cfg_.planner.max_expansions;
  r.plan = planner::bfws_plan(task, scfg);
  const std::int64_t t2 = clock.now_ms();
  r.t_plan_ms = t2 - t1;
  r.stage = PlanResult::Stage::Planned;

  // Cover every schema the plan actually uses, not just the chosen actions:
  // the planner may pull in intermediate steps to bridge modalities.
  std::vector<std::string> tasks;
  for (const planner::PlanStep& s : r.plan.steps)
    if (std::find(tasks.begin(), tasks.end(), s.schema_name) == tasks.end())
      tasks.push_back(s.schema_name);
  r.selection = selection::select_models(graph_, tasks, constraints);
  const std::int64_t t3 = clock.now_ms();
  r.t_select_ms = t3 - t0;
  r.stage = PlanResult::Stage::Selected;
  return r;
}

exec::ExecutionTrace Engine::execute(const PlanResult& pr, exec::Clock& clock) {
  exec::ExecutionTrace trace;
  if (pr.empty) {
    trace.parsed = pr.parsed;
    trace.selection = pr.selection;
  } else {
    trace = exec::execute_plan(pr.plan, pr.selection, pr.parsed, graph_, specs_,
                               registry_, clock);
  }
  trace.query = pr.query;
  trace.domains = pr.domains;
  trace.selected_actions = pr.actions;
  trace.t_parse_ms = pr.t_parse_ms;
  trace.t_plan_ms = pr.t_plan_ms;
  trace.t_select_ms = pr.t_select_ms;
  return trace;
}

evalbench::RunOutcome Engine::run_record(const evalbench::BenchRecord& rec) {
  evalbench::RunOutcome o;
  o.record_id = rec.id;
  exec::VirtualClock clock;

  PlanResult pr;
  bool planned = false;
  try {
    plan_query(rec.query, selection::Constraints{}, clock, &pr);
    planned = true;
  } catch (const Error&) {
    // Fall through; `pr.stage` tells how far the pipeline got.
  }

  if (pr.stage >= PlanResult::Stage::ActionsChosen)
    o.selected_tasks.items = pr.actions;
  else
    o.selected_tasks.err = true;
  if (pr.stage >= PlanResult::Stage::Planned)
    for (const planner::PlanStep& s : pr.plan.steps)
      o.plan_order.items.push_back(s.schema_name);
  if (pr.stage < PlanResult::Stage::Planned) o.plan_order.err = true;
  if (pr.stage >= PlanResult::Stage::Selected) o.t_select_ms = pr.t_select_ms;

  if (!planned || !pr.selection.complete()) {
    o.output_ok = evalbench::Mark::Err;
    return o;
  }

  exec::ExecutionTrace trace = execute(pr, clock);
  if (trace.final_status != "Ok") {
    o.output_ok = evalbench::Mark::Err;
  } else if (rec.expect_contains) {
    const bool hit = trace.final_output &&
                     trace.final_output->find(*rec.expect_contains) != std::string::npos;
    o.output_ok = hit ? evalbench::Mark::One : evalbench::Mark::Zero;
  }
  // Without a judge configuration the pre-annotated verdict (if any) applies.
  return o;
}

}  // namespace hive::pipeline

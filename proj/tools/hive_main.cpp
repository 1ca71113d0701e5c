// hive: knowledge-aware orchestration CLI.
//
// Exit codes: 0 success, 1 input/schema problems, 2 planning or model
// selection failures (including any unassigned action), 3 execution failures.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hive/ckg.hpp"
#include "hive/config.hpp"
#include "hive/errors.hpp"
#include "hive/evalbench.hpp"
#include "hive/exec.hpp"
#include "hive/ingest.hpp"
#include "hive/nlu.hpp"
#include "hive/pddl.hpp"
#include "hive/pipeline.hpp"
#include "hive/planner.hpp"
#include "hive/prompts.hpp"
#include "hive/provider.hpp"
#include "hive/selection.hpp"
#include "hive/util.hpp"

namespace fs = std::filesystem;
using namespace hive;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitPlanning = 2;
constexpr int kExitExecution = 3;

std::map<std::string, std::string> process_env() {
  std::map<std::string, std::string> env;
  for (const char* key : {"HIVE_PROVIDER_URL", "HIVE_PROVIDER_TOKEN", "HIVE_OFFLINE"})
    if (const char* v = std::getenv(key)) env[key] = v;
  return env;
}

// Global flag surface shared by all subcommands.
struct GlobalFlags {
  std::optional<std::string> config_file;
  config::Overrides over;
};

void attach_global_flags(CLI::App& app, GlobalFlags& g) {
  app.add_option("--config", g.config_file, "JSON config file");
  app.add_option("--provider-url", g.over.provider_url, "completion endpoint URL");
  app.add_option("--provider-token", g.over.provider_token, "bearer token");
  app.add_flag(
      "--offline,!--online",
      [&g](std::int64_t count) { g.over.offline = count > 0; },
      "use the canned-reply provider (default) or the HTTP provider");
  app.add_option("--fixtures", g.over.fixtures_dir, "canned provider reply directory");
  app.add_option("--ckg", g.over.ckg_path, "capability graph triples file");
  app.add_option("--specs", g.over.specs_path, "execution specs JSON");
  app.add_option("--registry", g.over.registry_path, "backend registry JSON");
  app.add_option("--domains", g.over.domains_dir, "planning domain directory");
  app.add_option("--prompts", g.over.prompts_dir, "prompt template directory");
  app.add_option("--max-width", g.over.max_width, "novelty pruning width (1 or 2)");
  app.add_option("--max-expansions", g.over.max_expansions, "search expansion budget");
  app.add_option("--ground-cap", g.over.ground_max_actions, "ground action cap");
  app.add_flag(
      "--err-as-zero,!--skip-err",
      [&g](std::int64_t count) { g.over.err_as_zero = count > 0; },
      "count errored runs as 0 in metric means instead of excluding them");
  app.add_flag(
      "--couple-fot,!--no-couple-fot",
      [&g](std::int64_t count) { g.over.couple_fot = count > 0; },
      "force flow mark to 0 when the selection mark is 0 (default on)");
}

config::Config resolve_config(const GlobalFlags& g) {
  return config::load(g.config_file, g.over, process_env());
}

// Constraint flags shared by plan/run.
struct ConstraintFlags {
  std::vector<std::string> licenses;
  bool min_size = false;
  std::string benchmark;
  std::string metric;
};

void attach_constraint_flags(CLI::App& cmd, ConstraintFlags& c) {
  cmd.add_option("--licenses", c.licenses, "accepted license names (comma separated)")
      ->delimiter(',');
  cmd.add_flag("--min-size", c.min_size, "prefer the smallest compliant model");
  cmd.add_option("--benchmark", c.benchmark, "rank by results on this benchmark");
  cmd.add_option("--metric", c.metric, "metric for --benchmark ranking");
}

selection::Constraints to_constraints(const ConstraintFlags& c) {
  selection::Constraints out;
  out.license_whitelist = c.licenses;
  out.minimize_size = c.min_size;
  if (!c.benchmark.empty()) out.benchmark = c.benchmark;
  if (!c.metric.empty()) out.metric = c.metric;
  if (out.benchmark.has_value() != out.metric.has_value())
    throw Error("--benchmark and --metric must be given together");
  return out;
}

std::string render_stats(const ckg::Stats& s) {
  std::ostringstream os;
  os << "== ckg stats ==\n";
  os << "  triples=" << s.triples << " entities=" << s.entities << "\n";
  for (const auto& [kind, n] : s.by_kind) os << "  kind " << kind << "=" << n << "\n";
  for (const auto& [pred, n] : s.by_predicate)
    os << "  predicate " << pred << "=" << n << "\n";
  return os.str();
}

nlohmann::json stats_to_json(const ckg::Stats& s) {
  return nlohmann::json{{"triples", s.triples},
                        {"entities", s.entities},
                        {"by_kind", s.by_kind},
                        {"by_predicate", s.by_predicate}};
}

nlohmann::json spec_to_json(const exec::ExecutionSpec& spec) {
  nlohmann::json params = nlohmann::json::array();
  for (const exec::ParamSpec& p : spec.params) {
    nlohmann::json jp{{"name", p.name}, {"semantic_type", p.semantic_type}};
    if (p.default_value) jp["default"] = *p.default_value;
    params.push_back(jp);
  }
  nlohmann::json j{{"params", params}, {"output_type", spec.output_type}};
  if (!spec.snippet.empty()) j["snippet"] = spec.snippet;
  if (spec.backend != "stub") j["backend"] = spec.backend;
  return j;
}

exec::ExecutionTrace trace_of(const pipeline::PlanResult& pr) {
  exec::ExecutionTrace t;
  t.query = pr.query;
  t.parsed = pr.parsed;
  t.domains = pr.domains;
  t.selected_actions = pr.actions;
  t.plan = pr.plan;
  t.selection = pr.selection;
  t.t_parse_ms = pr.t_parse_ms;
  t.t_plan_ms = pr.t_plan_ms;
  t.t_select_ms = pr.t_select_ms;
  return t;
}

std::vector<fs::path> sorted_files(const std::string& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw Error("directory not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ext)
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

// ---------------------------------------------------------------- ingest --

int cmd_ingest(const config::Config& cfg, const std::string& cards_dir,
               const std::string& pwc_path, const std::string& out_path,
               const std::string& specs_out) {
  std::vector<ingest::ModelCard> cards;
  for (const fs::path& f : sorted_files(cards_dir, ".md"))
    cards.push_back(ingest::load_model_card(f.string()));
  std::vector<ingest::PwcRecord> pwc = ingest::load_pwc_records(pwc_path);

  // Build fully in memory and write in one shot so a failure leaves no
  // partial output behind.
  ckg::CapabilityGraph graph = ingest::build_graph(cards, pwc);
  std::ostringstream buf;
  graph.serialize(buf);
  util::write_file(out_path, buf.str());

  if (!specs_out.empty()) {
    prompts::PromptLibrary lib(cfg.prompts_dir);
    std::unique_ptr<provider::TextCompletion> prov;
    if (cfg.provider.offline)
      prov = std::make_unique<provider::FixtureProvider>(cfg.provider.fixtures);
    else
      prov = std::make_unique<provider::HttpProvider>(cfg.provider.url, cfg.provider.token);
    nlohmann::json specs = nlohmann::json::object();
    try {
      for (const ingest::ModelCard& card : cards) {
        std::vector<ingest::CodeBlock> blocks = ingest::extract_code_blocks(card);
        if (blocks.empty()) continue;
        exec::ExecutionSpec spec =
            ingest::synthesize_execution_spec(blocks, card.model_id, *prov, lib);
        specs[card.model_id] = spec_to_json(spec);
      }
    } catch (...) {
      fs::remove(out_path);  // keep the two outputs consistent
      throw;
    }
    util::write_file(specs_out, specs.dump(2) + "\n");
  }

  std::cout << "ingested " << cards.size() << " cards, " << pwc.size()
            << " benchmark records -> " << out_path << "\n";
  std::cout << render_stats(graph.stats());
  return kExitOk;
}

// ------------------------------------------------------------- plan / run --

int cmd_plan(const config::Config& cfg, const std::string& query,
             const ConstraintFlags& cflags, bool as_json) {
  pipeline::Engine engine(cfg);
  std::unique_ptr<exec::Clock> clock;
  if (cfg.provider.offline)
    clock = std::make_unique<exec::VirtualClock>();
  else
    clock = std::make_unique<exec::SystemClock>();
  pipeline::PlanResult pr = engine.plan_query(query, to_constraints(cflags), *clock);
  exec::ExecutionTrace t = trace_of(pr);
  if (as_json) {
    nlohmann::json j{{"config", config::to_json(cfg)}, {"trace", exec::to_json(t)}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << config::render(cfg) << exec::render_report(t);
  }
  return pr.selection.complete() ? kExitOk : kExitPlanning;
}

int cmd_run(const config::Config& cfg, const std::string& query,
            const ConstraintFlags& cflags, bool as_json, const std::string& trace_out) {
  pipeline::Engine engine(cfg);
  std::unique_ptr<exec::Clock> clock;
  if (cfg.provider.offline)
    clock = std::make_unique<exec::VirtualClock>();
  else
    clock = std::make_unique<exec::SystemClock>();
  pipeline::PlanResult pr = engine.plan_query(query, to_constraints(cflags), *clock);

  if (!pr.selection.complete()) {
    exec::ExecutionTrace t = trace_of(pr);
    t.final_status = "Err";
    t.error = "model selection incomplete";
    if (as_json) {
      nlohmann::json j{{"config", config::to_json(cfg)}, {"trace", exec::to_json(t)}};
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << config::render(cfg) << exec::render_report(t);
    }
    return kExitPlanning;
  }

  exec::ExecutionTrace t = engine.execute(pr, *clock);
  if (!trace_out.empty()) util::write_file(trace_out, exec::to_json(t).dump(2) + "\n");
  if (as_json) {
    nlohmann::json j{{"config", config::to_json(cfg)}, {"trace", exec::to_json(t)}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << config::render(cfg) << exec::render_report(t);
  }
  return t.final_status == "Ok" ? kExitOk : kExitExecution;
}

// -------------------------------------------------------------------- eval --

int cmd_eval(const config::Config& cfg, const std::string& bench_path,
             const std::string& outcomes_path, bool live, int jobs, bool as_json,
             const std::string& outcomes_out) {
  std::vector<evalbench::BenchRecord> bench = evalbench::load_bench(bench_path);
  if (bench.empty()) throw Error("bench file has no records: " + bench_path);

  std::vector<evalbench::RunOutcome> outcomes;
  if (live) {
    pipeline::Engine engine(cfg);
    outcomes.resize(bench.size());
    const int n = std::max(1, jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < bench.size();) {
        try {
          outcomes[i] = engine.run_record(bench[i]);
        } catch (const std::exception&) {
          outcomes[i] = evalbench::RunOutcome{};
          outcomes[i].record_id = bench[i].id;
          outcomes[i].selected_tasks.err = true;
          outcomes[i].plan_order.err = true;
          outcomes[i].output_ok = evalbench::Mark::Err;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
  } else {
    outcomes = evalbench::load_outcomes(outcomes_path);
  }

  if (!outcomes_out.empty()) {
    std::ostringstream buf;
    for (const evalbench::RunOutcome& o : outcomes)
      buf << evalbench::outcome_to_json(o).dump() << "\n";
    util::write_file(outcomes_out, buf.str());
  }

  evalbench::EvalConfig ecfg;
  ecfg.err_as_zero = cfg.eval.err_as_zero;
  ecfg.couple_fot = cfg.eval.couple_fot;
  evalbench::EvalReport report = evalbench::evaluate(bench, outcomes, ecfg);

  if (as_json) {
    nlohmann::json j{{"config", config::to_json(cfg)},
                     {"report", evalbench::to_json(report)},
                     {"accounting", "PASS"}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << config::render(cfg);
    std::cout << "accounting: quadrants cover all " << bench.size() << " records: PASS\n";
    std::cout << evalbench::render_text(report, ecfg);
  }
  return kExitOk;
}

// --------------------------------------------------------------------- ckg --

int cmd_ckg_stats(const config::Config& cfg, bool as_json) {
  ckg::CapabilityGraph graph = ckg::load_graph_file(cfg.ckg.path);
  if (as_json)
    std::cout << stats_to_json(graph.stats()).dump(2) << "\n";
  else
    std::cout << render_stats(graph.stats());
  return kExitOk;
}

int cmd_ckg_query(const config::Config& cfg, const std::string& task, bool as_json) {
  ckg::CapabilityGraph graph = ckg::load_graph_file(cfg.ckg.path);
  ckg::NodeId node{ckg::NodeKind::Task, task};
  std::vector<ckg::ModelRecord> models = graph.models_for_task(node);
  if (as_json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ckg::ModelRecord& m : models) {
      nlohmann::json j{{"model", m.model.local_name},
                       {"results", m.results.size()},
                       {"has_snippet", m.snippet.has_value()}};
      if (m.license) j["license"] = *m.license;
      if (m.size_bytes) j["size_bytes"] = *m.size_bytes;
      arr.push_back(j);
    }
    std::cout << arr.dump(2) << "\n";
    return kExitOk;
  }
  std::cout << "== models for task " << task << " ==\n";
  if (models.empty()) std::cout << "  (none)\n";
  for (const ckg::ModelRecord& m : models) {
    std::cout << "  " << m.model.local_name;
    std::cout << "  license=" << (m.license ? *m.license : "-");
    if (m.size_bytes)
      std::cout << " size=" << *m.size_bytes;
    else
      std::cout << " size=-";
    std::cout << " results=" << m.results.size()
              << " snippet=" << (m.snippet ? "yes" : "no") << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------ fixtures gen --

// Replays the canned conversations in the exchange script through the real
// pipeline stages and writes one <prompt-hash>.txt reply file per exchange,
// which is exactly what the offline provider serves at run time.
int cmd_fixtures_gen(const config::Config& cfg, const std::string& exchanges_path,
                     const std::string& out_dir) {
  fs::create_directories(out_dir);
  config::Config boot = cfg;
  boot.provider.fixtures = out_dir;  // Engine only needs the directory to exist
  pipeline::Engine engine(boot);
  const prompts::PromptLibrary& lib = engine.prompt_library();

  nlohmann::json script;
  try {
    script = nlohmann::json::parse(util::read_file(exchanges_path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("exchanges file: ") + e.what());
  }

  std::size_t written = 0;
  auto emit = [&](const provider::RecordingProvider& rec) {
    for (const auto& [prompt, reply] : rec.exchanges()) {
      util::write_file(out_dir + "/" + util::fnv1a64_hex(prompt) + ".txt", reply);
      ++written;
    }
  };

  for (const nlohmann::json& entry : script.value("queries", nlohmann::json::array())) {
    const std::string query = entry.at("query").get<std::string>();
    std::vector<std::string> replies;
    replies.push_back(entry.at("parse").get<std::string>());
    replies.push_back(entry.at("classify").get<std::string>());
    const bool has_select = entry.contains("select");
    if (has_select) replies.push_back(entry.at("select").get<std::string>());

    provider::ScriptedProvider scripted(replies);
    provider::RecordingProvider rec(scripted);
    nlu::ParsedQuery pq = nlu::parse_query(query, rec, lib);
    const std::string instruction = pq.instruction.value_or(query);
    nlu::DomainSubset ds = nlu::classify_domains(instruction, engine.domain_names(), rec, lib);
    if (!ds.domains.empty()) {
      if (!has_select)
        throw Error("exchanges entry for '" + query + "' needs a select reply");
      std::vector<pddl::DomainFile> chosen;
      for (const std::string& d : ds.domains) chosen.push_back(engine.domains().at(d));
      pddl::DomainFile merged = pddl::merge_domains(chosen);
      pddl::add_done_markers(merged);
      std::vector<std::string> offered;
      for (const pddl::ActionSchema& a : merged.actions) offered.push_back(a.name);
      nlu::select_actions(instruction, offered, rec, lib);
    } else if (has_select) {
      throw Error("exchanges entry for '" + query + "' has an unused select reply");
    }
    if (rec.exchanges().size() != replies.size())
      throw Error("exchanges entry for '" + query + "' consumed " +
                  std::to_string(rec.exchanges().size()) + " of " +
                  std::to_string(replies.size()) + " replies");
    emit(rec);
  }

  for (const nlohmann::json& entry : script.value("cards", nlohmann::json::array())) {
    const std::string path = entry.at("path").get<std::string>();
    const std::string reply = entry.at("reply").get<std::string>();
    ingest::ModelCard card = ingest::load_model_card(path);
    std::vector<ingest::CodeBlock> blocks = ingest::extract_code_blocks(card);
    if (blocks.empty()) throw Error("card has no snippet blocks: " + path);
    provider::ScriptedProvider scripted({reply});
    provider::RecordingProvider rec(scripted);
    ingest::synthesize_execution_spec(blocks, card.model_id, rec, lib);
    emit(rec);
  }

  std::cout << "wrote " << written << " provider fixtures to " << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge-aware orchestration engine"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  attach_global_flags(app, g);

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "build a capability graph from model cards");
  std::string cards_dir, pwc_path, out_path, specs_out;
  ingest_cmd->add_option("--cards", cards_dir, "model card directory")->required();
  ingest_cmd->add_option("--pwc", pwc_path, "benchmark records JSONL")->required();
  ingest_cmd->add_option("--out", out_path, "output triples file")->required();
  ingest_cmd->add_option("--specs-out", specs_out, "also synthesize execution specs here");

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "plan a query without executing");
  std::string plan_query_text;
  ConstraintFlags plan_cons;
  bool plan_json = false;
  plan_cmd->add_option("--query", plan_query_text, "natural-language query")->required();
  attach_constraint_flags(*plan_cmd, plan_cons);
  plan_cmd->add_flag("--json", plan_json, "emit a structured record instead of text");

  // run
  auto* run_cmd = app.add_subcommand("run", "plan and execute a query");
  std::string run_query_text, trace_out;
  ConstraintFlags run_cons;
  bool run_json = false;
  run_cmd->add_option("--query", run_query_text, "natural-language query")->required();
  attach_constraint_flags(*run_cmd, run_cons);
  run_cmd->add_flag("--json", run_json, "emit a structured record instead of text");
  run_cmd->add_option("--trace-out", trace_out, "also write the trace record here");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score a benchmark");
  std::string bench_path, outcomes_path, outcomes_out;
  bool live = false, eval_json = false;
  int jobs = 1;
  eval_cmd->add_option("--bench", bench_path, "bench records JSONL")->required();
  auto* oc_opt = eval_cmd->add_option("--outcomes", outcomes_path, "pre-recorded outcomes JSONL");
  auto* live_opt = eval_cmd->add_flag("--live", live, "run every record through the engine");
  oc_opt->excludes(live_opt);
  eval_cmd->add_option("--jobs", jobs, "parallel workers for --live")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_flag("--json", eval_json, "emit a structured record instead of text");
  eval_cmd->add_option("--outcomes-out", outcomes_out, "write live outcomes here");

  // ckg
  auto* ckg_cmd = app.add_subcommand("ckg", "capability graph queries");
  ckg_cmd->require_subcommand(1);
  auto* stats_cmd = ckg_cmd->add_subcommand("stats", "print graph statistics");
  bool stats_json = false;
  stats_cmd->add_flag("--json", stats_json, "emit a structured record instead of text");
  auto* query_cmd = ckg_cmd->add_subcommand("query", "list models for a task");
  std::string task_name;
  bool query_json = false;
  query_cmd->add_option("--task", task_name, "task local name")->required();
  query_cmd->add_flag("--json", query_json, "emit a structured record instead of text");

  // fixtures
  auto* fixtures_cmd = app.add_subcommand("fixtures", "offline fixture tooling");
  fixtures_cmd->require_subcommand(1);
  auto* gen_cmd = fixtures_cmd->add_subcommand("gen", "write provider reply files");
  std::string exchanges_path = "fixtures/provider/exchanges.json";
  std::string gen_out = "fixtures/provider";
  gen_cmd->add_option("--exchanges", exchanges_path, "exchange script JSON");
  gen_cmd->add_option("--out", gen_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    const config::Config cfg = resolve_config(g);
    if (*ingest_cmd) return cmd_ingest(cfg, cards_dir, pwc_path, out_path, specs_out);
    if (*plan_cmd) return cmd_plan(cfg, plan_query_text, plan_cons, plan_json);
    if (*run_cmd) return cmd_run(cfg, run_query_text, run_cons, run_json, trace_out);
    if (*eval_cmd) {
      if (!live && outcomes_path.empty())
        throw Error("eval needs --outcomes or --live");
      return cmd_eval(cfg, bench_path, outcomes_path, live, jobs, eval_json, outcomes_out);
    }
    if (*stats_cmd) return cmd_ckg_stats(cfg, stats_json);
    if (*query_cmd) return cmd_ckg_query(cfg, task_name, query_json);
    if (*gen_cmd) return cmd_fixtures_gen(cfg, exchanges_path, gen_out);
    std::cerr << "error: no subcommand\n";
    return kExitInput;
  } catch (const ExecutionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitExecution;
  } catch (const UnboundParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitExecution;
  } catch (const UnknownAction& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPlanning;
  } catch (const NoInputArtifact& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPlanning;
  } catch (const GroundingExplosion& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPlanning;
  } catch (const NoPlanFound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPlanning;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPlanning;
  } catch (const ScaleGuard& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPlanning;
  } catch (const EmptySelection& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPlanning;
  } catch (const ProviderError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPlanning;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

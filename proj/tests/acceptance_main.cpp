// Acceptance gate: checks the eight shipping criteria and prints exactly one
// PASS/FAIL line per criterion. Exit 0 iff all pass. Run from anywhere; the
// CLI-driving criteria need HIVE_BIN to point at the hive binary.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hive/ckg.hpp"
#include "hive/embed.hpp"
#include "hive/errors.hpp"
#include "hive/evalbench.hpp"
#include "hive/ingest.hpp"
#include "hive/pddl.hpp"
#include "hive/planner.hpp"
#include "hive/prompts.hpp"
#include "hive/selection.hpp"
#include "hive/util.hpp"
#include "testgen.hpp"

using namespace hive;
namespace fs = std::filesystem;

namespace {

const std::string kRoot = HIVE_SOURCE_ROOT;
constexpr double kMeanTolerance = 0.005;   // scoreboard means
constexpr double kScenarioBudgetS = 1.0;   // per selection scenario
constexpr double kSweepBudgetS = 60.0;     // whole planner sweep

int failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& why) {
  std::string line = std::string(ok ? "[PASS]" : "[FAIL]") + " criterion " +
                     std::to_string(idx) + ": " + name;
  if (!ok && !why.empty()) line += " — " + why;
  std::printf("%s\n", line.c_str());
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct CmdResult {
  int status = -1;
  std::string out;
};

CmdResult run_cli(const std::string& args) {
  CmdResult r;
  const char* bin = std::getenv("HIVE_BIN");
  if (!bin) return r;
  std::string cmd = "cd '" + kRoot + "' && '" + bin + "' " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int rc = pclose(pipe);
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return r;
}

// --------------------------------------------------------------------------
// 1: constrained model selection over the bundled capability graph.

void criterion_selection() {
  std::string why;
  bool ok = true;
  try {
    ckg::CapabilityGraph graph =
        ckg::load_graph_file(kRoot + "/fixtures/ckg/muse.triples");
    const std::string asr = "automatic_speech_recognition";

    auto timed = [&](const selection::Constraints& c,
                     const std::vector<std::string>& tasks) {
      auto t0 = std::chrono::steady_clock::now();
      selection::SelectionResult r = selection::select_models(graph, tasks, c);
      double dt = seconds_since(t0);
      if (dt >= kScenarioBudgetS) {
        ok = false;
        why += "scenario exceeded " + std::to_string(kScenarioBudgetS) + "s; ";
      }
      return r;
    };

    selection::Constraints lic;
    lic.license_whitelist = {"openrail++", "deepseek"};
    selection::SelectionResult r1 =
        timed(lic, {asr, "named_entity_recognition"});
    std::size_t assigned = 0;
    for (const auto& a : r1.assignments) assigned += a.model.has_value();
    if (r1.assignments.size() != 2 || assigned != 0) {
      ok = false;
      why += "license whitelist should leave zero assignments; ";
    }

    selection::Constraints small;
    small.minimize_size = true;
    selection::SelectionResult r2 = timed(small, {asr});
    if (!r2.complete() ||
        r2.assignments[0].model->local_name != "nvidia/parakeet-rnnt-1.1b") {
      ok = false;
      why += "size preference should pick the smaller speech model; ";
    }

    selection::Constraints bench;
    bench.benchmark = "common_voice_english";
    bench.metric = "wer";
    selection::SelectionResult r3 = timed(bench, {asr});
    if (!r3.complete() ||
        r3.assignments[0].model->local_name != "nvidia/parakeet-rnnt-1.1b" ||
        r3.assignments[0].rationale.winning_value != 6.0) {
      ok = false;
      why += "error-rate ranking should pick the lower-WER model; ";
    }
  } catch (const std::exception& e) {
    ok = false;
    why = e.what();
  }
  report(1, "constrained model selection", ok, why);
}

// --------------------------------------------------------------------------
// 2: width-2 search agrees with the exhaustive oracle on 500 random tasks.

void criterion_planner_sweep() {
  std::string why;
  bool ok = true;
  auto t0 = std::chrono::steady_clock::now();
  try {
    util::Rng rng(20260816);
    planner::SearchConfig cfg;
    cfg.max_width = 2;
    std::size_t solvable = 0, unsolvable = 0;
    for (int i = 0; i < 500 && ok; ++i) {
      pddl::GroundedTask task = testgen::random_task(rng);
      std::optional<planner::Plan> oracle = planner::bfs_oracle(task);
      std::optional<planner::Plan> found;
      try {
        found = planner::bfws_plan(task, cfg);
      } catch (const NoPlanFound&) {
      }
      if (found.has_value() != oracle.has_value()) {
        ok = false;
        why = "oracle disagreement on task " + std::to_string(i);
        break;
      }
      if (found && !planner::validate_plan(task, *found)) {
        ok = false;
        why = "invalid plan on task " + std::to_string(i);
        break;
      }
      if (oracle && !planner::validate_plan(task, *oracle)) {
        ok = false;
        why = "oracle produced an invalid plan on task " + std::to_string(i);
        break;
      }
      ++(found ? solvable : unsolvable);
    }
    if (ok && (solvable < 100 || unsolvable < 100)) {
      ok = false;
      why = "sweep is not exercising both outcomes (solvable=" +
            std::to_string(solvable) + ")";
    }
    double dt = seconds_since(t0);
    if (ok && dt >= kSweepBudgetS) {
      ok = false;
      why = "sweep took " + std::to_string(dt) + "s";
    }
  } catch (const std::exception& e) {
    ok = false;
    why = e.what();
  }
  report(2, "width-2 search matches the exhaustive oracle on 500 tasks", ok, why);
}

// --------------------------------------------------------------------------
// 3: offline speech-to-entities pipeline feeds the transcript onward.

void criterion_pipeline_chain() {
  CmdResult r = run_cli(
      "run --query 'Transcribe the speech ./data/audios/audio_1.wav and find "
      "the named entities in the transcript.'");
  bool ok = r.status == 0 &&
            r.out.find("United States") != std::string::npos &&
            r.out.find("United States of America") != std::string::npos;
  std::string why;
  if (r.status == -1)
    why = "could not launch the CLI (is HIVE_BIN set?)";
  else if (!ok)
    why = "exit " + std::to_string(r.status) + "; transcript or entities missing";
  report(3, "speech-to-entities run surfaces the expected spans", ok, why);
}

// --------------------------------------------------------------------------
// 4: scoreboard accounting invariants and the frozen 100-record report.

void criterion_scoreboard() {
  using evalbench::Mark;
  using evalbench::ScoreRow;
  std::string why;
  bool ok = true;
  try {
    util::Rng rng(911);
    auto random_mark = [&](bool allow_err) {
      int v = rng.range(0, allow_err ? 2 : 1);
      return v == 0 ? Mark::Zero : v == 1 ? Mark::One : Mark::Err;
    };
    for (int c = 0; c < 1000 && ok; ++c) {
      std::size_t n = static_cast<std::size_t>(rng.range(1, 40));
      std::vector<ScoreRow> rows;
      for (std::size_t i = 0; i < n; ++i) {
        Mark ts = random_mark(true);
        Mark fot = ts == Mark::Err ? Mark::Err
                   : ts == Mark::Zero ? Mark::Zero
                                      : random_mark(false);
        rows.push_back({ts, fot, random_mark(true)});
      }
      evalbench::Quadrants q = evalbench::trustworthiness(rows);
      evalbench::FailureCells f = evalbench::failure_table(rows);
      if (q.total() != n || f.total() != q.err) {
        ok = false;
        why = "accounting invariant broke on case " + std::to_string(c);
      }
    }

    auto bench = evalbench::load_bench(kRoot + "/fixtures/eval/hive100.bench.jsonl");
    auto outcomes =
        evalbench::load_outcomes(kRoot + "/fixtures/eval/hive100.outcomes.jsonl");
    evalbench::EvalReport rep = evalbench::evaluate(bench, outcomes);
    auto near = [&](double got, double want) {
      return std::abs(got - want) <= kMeanTolerance;
    };
    if (!near(rep.table.overall.ts.mean, 0.74) ||
        !near(rep.table.overall.fot.mean, 0.73) ||
        !near(rep.table.overall.o.mean, 0.62)) {
      ok = false;
      why += "overall means drifted; ";
    }
    const evalbench::Quadrants& q = rep.quadrants;
    if (q.tt != 58 || q.tb != 10 || q.bt != 0 || q.bb != 26 || q.err != 6) {
      ok = false;
      why += "quadrants drifted; ";
    }
    const evalbench::FailureCells& f = rep.failures;
    if (f.err_top != 0 || f.top_err != 3 || f.bot_err != 0 || f.err_err != 3 ||
        f.total() != 6) {
      ok = false;
      why += "failure cells drifted; ";
    }
  } catch (const std::exception& e) {
    ok = false;
    why = e.what();
  }
  report(4, "scoreboard invariants and the frozen 100-record report", ok, why);
}

// --------------------------------------------------------------------------
// 5: taxonomy folding thresholds, exercised at exact boundary similarities.

// Binary indicator vectors with perfect-square support sizes: every boundary
// cosine is an exact small-integer ratio (81/90, 16/20, 1598/2000).
class BoundaryEmbedder : public embed::TextEmbedder {
 public:
  std::vector<double> embed(std::string_view text) const override {
    std::vector<double> v(7000, 0.0);
    auto ones = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) v[i] = 1.0;
    };
    std::string t(text);
    if (t == "alpha") ones(0, 100);
    if (t == "covered-task") ones(0, 81);        // 81/90  = 0.9
    if (t == "anchor") ones(200, 225);
    if (t == "inserted-task") ones(200, 216);    // 16/20  = 0.8
    if (t == "beta") ones(1000, 3500);
    if (t == "irrelevant-task") {                // 1598/2000 = 0.799
      ones(1000, 2598);
      ones(5000, 5002);
    }
    return v;
  }
};

void criterion_taxonomy() {
  std::string why;
  bool ok = true;
  try {
    BoundaryEmbedder e;
    if (embed::cosine(e.embed("covered-task"), e.embed("alpha")) != 0.9 ||
        embed::cosine(e.embed("inserted-task"), e.embed("anchor")) != 0.8 ||
        embed::cosine(e.embed("irrelevant-task"), e.embed("beta")) != 0.799) {
      ok = false;
      why += "stub similarities are not exact; ";
    }
    ingest::Taxonomy seed;
    seed.roots = {{"alpha", {{"anchor", {}}}}, {"beta", {}}};
    ingest::Taxonomy out = ingest::build_taxonomy(
        seed, {"covered-task", "inserted-task", "irrelevant-task"}, e);
    if (out.node_count() != seed.node_count() + 1) {
      ok = false;
      why += "exactly one task should have been inserted; ";
    }
    const ingest::TaxonomyNode& anchor = out.roots[0].children[0];
    if (anchor.label != "anchor" || anchor.children.size() != 1 ||
        anchor.children[0].label != "inserted-task") {
      ok = false;
      why += "the 0.8 task should sit under its anchor; ";
    }
    if (!out.roots[1].children.empty()) {
      ok = false;
      why += "the 0.799 task should have been dropped; ";
    }
  } catch (const std::exception& e2) {
    ok = false;
    why = e2.what();
  }
  report(5, "taxonomy folding thresholds at 0.9 / 0.8 / 0.799", ok, why);
}

// --------------------------------------------------------------------------
// 6: parse ∘ print is the identity on domain files.

void criterion_pddl_identity() {
  std::string why;
  bool ok = true;
  try {
    std::size_t fixture_count = 0;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(kRoot + "/fixtures/pddl"))
      if (entry.path().extension() == ".pddl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
      pddl::DomainFile d = pddl::parse_domain(util::read_file(f.string()));
      std::string printed = pddl::print_domain(d);
      if (pddl::parse_domain(printed) != d ||
          pddl::print_domain(pddl::parse_domain(printed)) != printed) {
        ok = false;
        why = "fixture identity broke: " + f.filename().string();
        break;
      }
      ++fixture_count;
    }
    if (ok && fixture_count == 0) {
      ok = false;
      why = "no domain fixtures found";
    }
    util::Rng rng(6006);
    for (int i = 0; i < 200 && ok; ++i) {
      pddl::DomainFile d = testgen::random_domain(rng, i);
      if (pddl::parse_domain(pddl::print_domain(d)) != d) {
        ok = false;
        why = "generated identity broke on domain " + std::to_string(i);
      }
    }
  } catch (const std::exception& e) {
    ok = false;
    why = e.what();
  }
  report(6, "domain files survive a print/parse round trip", ok, why);
}

// --------------------------------------------------------------------------
// 7: offline runs are reproducible byte for byte.

void criterion_reproducibility() {
  const std::string q =
      "run --query 'Summarise the story told in ./data/audios/audio_8.wav and "
      "create an illustration for it.'";
  CmdResult a = run_cli(q + " --trace-out /tmp/hive_accept_trace_a.json");
  CmdResult b = run_cli(q + " --trace-out /tmp/hive_accept_trace_b.json");
  bool ok = a.status == 0 && b.status == 0 && a.out == b.out;
  std::string why;
  if (a.status == -1)
    why = "could not launch the CLI (is HIVE_BIN set?)";
  else if (a.status != 0 || b.status != 0)
    why = "runs exited " + std::to_string(a.status) + "/" + std::to_string(b.status);
  else if (a.out != b.out)
    why = "stdout differs between consecutive runs";
  if (ok) {
    try {
      ok = util::read_file("/tmp/hive_accept_trace_a.json") ==
           util::read_file("/tmp/hive_accept_trace_b.json");
      if (!ok) why = "trace files differ between consecutive runs";
    } catch (const std::exception& e) {
      ok = false;
      why = e.what();
    }
  }
  report(7, "consecutive offline runs are byte-identical", ok, why);
}

// --------------------------------------------------------------------------
// 8: prompt templates are the frozen texts.

void criterion_prompts() {
  std::string why;
  bool ok = true;
  try {
    prompts::PromptLibrary lib(kRoot + "/fixtures/prompts");
    auto pin = [&](const char* name, const char* sum) {
      if (util::fnv1a64_hex(lib.raw(name)) != sum) {
        ok = false;
        why += std::string(name) + " checksum drifted; ";
      }
    };
    pin(prompts::PromptLibrary::kSnippetExtraction, "344db9ef73b84e6a");
    pin(prompts::PromptLibrary::kParsing, "fb71784f7fc67865");
    pin(prompts::PromptLibrary::kDomainClassification, "c8fa564794828c4f");
    pin(prompts::PromptLibrary::kActionSelection, "b2a5680138d32cb3");
  } catch (const std::exception& e) {
    ok = false;
    why = e.what();
  }
  report(8, "prompt templates match their pinned checksums", ok, why);
}

}  // namespace

int main() {
  criterion_selection();
  criterion_planner_sweep();
  criterion_pipeline_chain();
  criterion_scoreboard();
  criterion_taxonomy();
  criterion_pddl_identity();
  criterion_reproducibility();
  criterion_prompts();
  return failures == 0 ? 0 : 1;
}

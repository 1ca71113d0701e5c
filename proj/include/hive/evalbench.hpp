#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hive::evalbench {

enum class Split { Single, Two, Three };

const char* split_name(Split s);
Split split_from_name(std::string_view name);  // throws ParseError

// Binary mark with an explicit error state; Err is never conflated with 0.
enum class Mark { Zero, One, Err };

bool is_err(Mark m);
nlohmann::json mark_to_json(Mark m);           // 0, 1 or "Err"
Mark mark_from_json(const nlohmann::json& j);  // throws ParseError

struct BenchRecord {
  std::string id;
  std::string query;
  std::vector<std::string> expected_tasks;  // ordered
  Split split = Split::Single;
  std::vector<std::string> modality_in;
  std::vector<std::string> modality_out;
  std::optional<Mark> output_verdict;  // pre-annotated O, when present
  // Configuration for the pluggable string-match judge in live runs.
  std::optional<std::string> expect_contains;
};

// Task list that may have collapsed into an error marker.
struct ListOrErr {
  bool err = false;
  std::vector<std::string> items;

  bool operator==(const ListOrErr&) const = default;
};

struct RunOutcome {
  std::string record_id;
  ListOrErr selected_tasks;
  ListOrErr plan_order;
  std::optional<Mark> output_ok;  // absent = missing annotation
  std::optional<std::int64_t> t_select_ms;
};

struct ScoreRow {
  Mark ts = Mark::Zero;
  Mark fot = Mark::Zero;
  Mark o = Mark::Zero;

  bool operator==(const ScoreRow&) const = default;
};

struct EvalConfig {
  bool couple_fot = true;    // force fot=0 when ts=0
  bool err_as_zero = false;  // count Err as 0 in means instead of excluding
};

// 1 iff the selected set equals the expected set (over-selection scores 0).
Mark score_ts(const std::vector<std::string>& expected, const ListOrErr& selected);

// 1 iff the plan order equals the expected order; with coupling on, ts=0
// forces 0.
Mark score_fot(const std::vector<std::string>& expected, const ListOrErr& plan,
               Mark ts, bool couple_fot = true);

// Pass-through of the annotation. Absent verdict: Err when the run itself
// erred, MissingVerdict otherwise — the harness never judges output quality.
Mark score_o(const std::optional<Mark>& verdict, bool run_erred);

ScoreRow score(const BenchRecord& record, const RunOutcome& outcome,
               const EvalConfig& cfg = {});

struct MetricAggregate {
  double mean = 0.0;
  std::size_t numeric = 0;  // rows in the denominator
  std::size_t errs = 0;
};

struct AggregateRow {
  MetricAggregate ts, fot, o;
  std::size_t rows = 0;
};

struct AggregateTable {
  std::map<Split, AggregateRow> by_split;
  AggregateRow overall;
};

// Mean per metric by split and overall. Err rows leave the denominator
// unless cfg.err_as_zero. Throws Error on empty input.
AggregateTable aggregate(const std::vector<std::pair<Split, ScoreRow>>& rows,
                         const EvalConfig& cfg = {});

// Justification j = T iff ts=1 and fot=1. Rows with Err in (j, o) land in
// the err bucket. tt+tb+bt+bb+err == row count, asserted by callers.
struct Quadrants {
  std::size_t tt = 0, tb = 0, bt = 0, bb = 0, err = 0;
  std::size_t total() const { return tt + tb + bt + bb + err; }
};

Quadrants trustworthiness(const std::vector<ScoreRow>& rows);

// Classifies every Err-involved row into one cell; (Err, 0) rows join
// (Err, Err) to keep the table total.
struct FailureCells {
  std::size_t err_top = 0;   // justification Err, output 1
  std::size_t top_err = 0;   // justification T, output Err
  std::size_t bot_err = 0;   // justification B, output Err
  std::size_t err_err = 0;   // Err on both sides
  std::size_t total() const { return err_top + top_err + bot_err + err_err; }
};

FailureCells failure_table(const std::vector<ScoreRow>& rows);

struct LatencyRow {
  double mean_s = 0.0;
  std::size_t count = 0;
};

struct LatencySummary {
  std::map<Split, LatencyRow> by_split;
  LatencyRow overall;
};

// Mean of t_select_ms / 1000 by split and overall; rows without timing are
// skipped.
LatencySummary latency_summary(
    const std::vector<std::pair<Split, std::optional<std::int64_t>>>& timings);

struct EvalReport {
  AggregateTable table;
  Quadrants quadrants;
  FailureCells failures;
  LatencySummary latency;
  std::vector<std::pair<std::string, ScoreRow>> rows;  // record id -> scores
};

// Scores every record against its outcome (matched by id; a missing or
// duplicate outcome is an Error) and aggregates. Asserts the quadrant
// accounting invariant.
EvalReport evaluate(const std::vector<BenchRecord>& bench,
                    const std::vector<RunOutcome>& outcomes,
                    const EvalConfig& cfg = {});

std::string render_text(const EvalReport& report, const EvalConfig& cfg = {});
nlohmann::json to_json(const EvalReport& report);

// Line-delimited JSON files; '#' lines are comments. Throw ParseError with
// line numbers.
std::vector<BenchRecord> load_bench(const std::string& path);
std::vector<RunOutcome> load_outcomes(const std::string& path);
nlohmann::json outcome_to_json(const RunOutcome& o);

}  // namespace hive::evalbench

#include <doctest.h>

#include <cmath>

#include "hive/errors.hpp"
#include "hive/evalbench.hpp"
#include "hive/util.hpp"

using namespace hive;
using evalbench::ListOrErr;
using evalbench::Mark;
using evalbench::ScoreRow;
using evalbench::Split;

namespace {

ListOrErr list(std::vector<std::string> items) { return {false, std::move(items)}; }
ListOrErr err_list() { return {true, {}}; }

ScoreRow row(Mark ts, Mark fot, Mark o) { return {ts, fot, o}; }

}  // namespace

TEST_CASE("split and mark codecs") {
  CHECK(evalbench::split_from_name("Single") == Split::Single);
  CHECK(evalbench::split_from_name("Two") == Split::Two);
  CHECK(evalbench::split_from_name("Three") == Split::Three);
  CHECK_THROWS_AS(evalbench::split_from_name("Four"), ParseError);
  CHECK(std::string(evalbench::split_name(Split::Two)) == "Two");

  CHECK(evalbench::mark_to_json(Mark::One) == 1);
  CHECK(evalbench::mark_to_json(Mark::Zero) == 0);
  CHECK(evalbench::mark_to_json(Mark::Err) == "Err");
  CHECK(evalbench::mark_from_json(nlohmann::json(1)) == Mark::One);
  CHECK(evalbench::mark_from_json(nlohmann::json("Err")) == Mark::Err);
  CHECK_THROWS_AS(evalbench::mark_from_json(nlohmann::json(2)), ParseError);
  CHECK(evalbench::is_err(Mark::Err));
  CHECK_FALSE(evalbench::is_err(Mark::Zero));
}

TEST_CASE("task selection scores on set equality") {
  std::vector<std::string> expected = {"asr", "ner"};
  CHECK(evalbench::score_ts(expected, list({"ner", "asr"})) == Mark::One);
  CHECK(evalbench::score_ts(expected, list({"asr"})) == Mark::Zero);
  CHECK(evalbench::score_ts(expected, list({"asr", "ner", "tts"})) == Mark::Zero);
  CHECK(evalbench::score_ts(expected, list({"asr", "tts"})) == Mark::Zero);
  CHECK(evalbench::score_ts(expected, err_list()) == Mark::Err);
}

TEST_CASE("flow order scores on exact order with coupling") {
  std::vector<std::string> expected = {"asr", "ner"};
  CHECK(evalbench::score_fot(expected, list({"asr", "ner"}), Mark::One) == Mark::One);
  CHECK(evalbench::score_fot(expected, list({"ner", "asr"}), Mark::One) == Mark::Zero);
  CHECK(evalbench::score_fot(expected, err_list(), Mark::One) == Mark::Err);
  // Coupling: a wrong set zeroes the flow mark even when the order matches.
  CHECK(evalbench::score_fot(expected, list({"asr", "ner"}), Mark::Zero) ==
        Mark::Zero);
  CHECK(evalbench::score_fot(expected, list({"asr", "ner"}), Mark::Zero, false) ==
        Mark::One);
}

TEST_CASE("output mark is a passthrough with an error rule") {
  CHECK(evalbench::score_o(Mark::One, false) == Mark::One);
  CHECK(evalbench::score_o(Mark::Err, false) == Mark::Err);
  CHECK(evalbench::score_o(std::nullopt, true) == Mark::Err);
  CHECK_THROWS_AS(evalbench::score_o(std::nullopt, false), MissingVerdict);
}

TEST_CASE("score composes the three metrics") {
  evalbench::BenchRecord rec;
  rec.id = "r";
  rec.expected_tasks = {"asr", "ner"};
  rec.split = Split::Two;

  evalbench::RunOutcome out;
  out.record_id = "r";
  out.selected_tasks = list({"asr", "ner"});
  out.plan_order = list({"asr", "ner"});
  out.output_ok = Mark::One;
  ScoreRow s = evalbench::score(rec, out);
  CHECK(s == row(Mark::One, Mark::One, Mark::One));

  out.selected_tasks = err_list();
  out.plan_order = err_list();
  out.output_ok = Mark::Err;
  s = evalbench::score(rec, out);
  CHECK(s == row(Mark::Err, Mark::Err, Mark::Err));

  // The record's own verdict backstops an outcome without output_ok.
  out = {};
  out.record_id = "r";
  out.selected_tasks = list({"asr", "ner"});
  out.plan_order = list({"asr", "ner"});
  rec.output_verdict = Mark::Zero;
  s = evalbench::score(rec, out);
  CHECK(s.o == Mark::Zero);
}

TEST_CASE("aggregate excludes or zeroes errors per config") {
  std::vector<std::pair<Split, ScoreRow>> rows = {
      {Split::Single, row(Mark::One, Mark::One, Mark::One)},
      {Split::Single, row(Mark::Zero, Mark::Zero, Mark::Zero)},
      {Split::Single, row(Mark::Err, Mark::Err, Mark::Err)},
      {Split::Two, row(Mark::One, Mark::Zero, Mark::One)},
  };
  evalbench::AggregateTable t = evalbench::aggregate(rows);
  CHECK(t.overall.rows == 4);
  CHECK(t.overall.ts.numeric == 3);
  CHECK(t.overall.ts.errs == 1);
  CHECK(t.overall.ts.mean == doctest::Approx(2.0 / 3));
  CHECK(t.overall.fot.mean == doctest::Approx(1.0 / 3));
  CHECK(t.by_split.at(Split::Single).ts.numeric == 2);
  CHECK(t.by_split.at(Split::Single).ts.mean == doctest::Approx(0.5));
  CHECK(t.by_split.at(Split::Two).o.mean == doctest::Approx(1.0));

  evalbench::EvalConfig zero;
  zero.err_as_zero = true;
  evalbench::AggregateTable z = evalbench::aggregate(rows, zero);
  CHECK(z.overall.ts.numeric == 4);
  CHECK(z.overall.ts.mean == doctest::Approx(0.5));

  CHECK_THROWS_AS(evalbench::aggregate({}), Error);
}

TEST_CASE("trustworthiness quadrants and failure cells") {
  std::vector<ScoreRow> rows = {
      row(Mark::One, Mark::One, Mark::One),    // TT
      row(Mark::One, Mark::One, Mark::Zero),   // TB
      row(Mark::Zero, Mark::One, Mark::One),   // BT (j needs both)
      row(Mark::One, Mark::Zero, Mark::Zero),  // BB
      row(Mark::Err, Mark::Err, Mark::One),    // err: (Err, T)
      row(Mark::One, Mark::One, Mark::Err),    // err: (T, Err)
      row(Mark::Zero, Mark::Zero, Mark::Err),  // err: (B, Err)
      row(Mark::Err, Mark::Err, Mark::Err),    // err: (Err, Err)
      row(Mark::Err, Mark::Err, Mark::Zero),   // err: (Err, 0) joins (Err, Err)
  };
  evalbench::Quadrants q = evalbench::trustworthiness(rows);
  CHECK(q.tt == 1);
  CHECK(q.tb == 1);
  CHECK(q.bt == 1);
  CHECK(q.bb == 1);
  CHECK(q.err == 5);
  CHECK(q.total() == rows.size());

  evalbench::FailureCells f = evalbench::failure_table(rows);
  CHECK(f.err_top == 1);
  CHECK(f.top_err == 1);
  CHECK(f.bot_err == 1);
  CHECK(f.err_err == 2);
  CHECK(f.total() == q.err);
}

TEST_CASE("accounting invariants hold on 1000 random outcome sets") {
  util::Rng rng(404);
  auto random_mark = [&](bool allow_err) {
    int v = rng.range(0, allow_err ? 2 : 1);
    return v == 0 ? Mark::Zero : v == 1 ? Mark::One : Mark::Err;
  };
  for (int c = 0; c < 1000; ++c) {
    std::size_t n = static_cast<std::size_t>(rng.range(1, 40));
    std::vector<ScoreRow> rows;
    std::vector<std::pair<Split, ScoreRow>> tagged;
    for (std::size_t i = 0; i < n; ++i) {
      // ts and fot err together (both derive from the same failed run).
      Mark ts = random_mark(true);
      Mark fot = ts == Mark::Err ? Mark::Err
                                 : (ts == Mark::Zero ? Mark::Zero
                                                     : random_mark(false));
      ScoreRow r{ts, fot, random_mark(true)};
      rows.push_back(r);
      tagged.emplace_back(static_cast<Split>(rng.range(0, 2)), r);
    }
    evalbench::Quadrants q = evalbench::trustworthiness(rows);
    CHECK(q.total() == n);
    evalbench::FailureCells f = evalbench::failure_table(rows);
    CHECK(f.total() == q.err);
    evalbench::AggregateTable t = evalbench::aggregate(tagged);
    CHECK(t.overall.rows == n);
    CHECK(t.overall.ts.numeric + t.overall.ts.errs == n);
    std::size_t split_rows = 0;
    for (const auto& [s, agg] : t.by_split) split_rows += agg.rows;
    CHECK(split_rows == n);
  }
}

TEST_CASE("latency summary averages seconds per split") {
  std::vector<std::pair<Split, std::optional<std::int64_t>>> timings = {
      {Split::Single, 4000},
      {Split::Single, 5000},
      {Split::Two, 6400},
      {Split::Two, std::nullopt},  // skipped
  };
  evalbench::LatencySummary s = evalbench::latency_summary(timings);
  CHECK(s.by_split.at(Split::Single).mean_s == doctest::Approx(4.5));
  CHECK(s.by_split.at(Split::Single).count == 2);
  CHECK(s.by_split.at(Split::Two).mean_s == doctest::Approx(6.4));
  CHECK(s.by_split.at(Split::Two).count == 1);
  CHECK(s.overall.count == 3);
  CHECK(s.overall.mean_s == doctest::Approx((4.0 + 5.0 + 6.4) / 3));
}

TEST_CASE("jsonl loaders validate and round trip") {
  const std::string dir = "/tmp/hive_evalbench_test";
  util::write_file(dir + ".bench.jsonl",
                   "# comment\n"
                   R"({"id": "r1", "query": "q", "split": "Two",)"
                   R"( "expected_tasks": ["a", "b"], "modality_in": ["audio"],)"
                   R"( "modality_out": ["text"], "expect_contains": "x"})"
                   "\n");
  auto bench = evalbench::load_bench(dir + ".bench.jsonl");
  REQUIRE(bench.size() == 1);
  CHECK(bench[0].split == Split::Two);
  CHECK(bench[0].expected_tasks == std::vector<std::string>{"a", "b"});
  CHECK(bench[0].expect_contains == "x");

  // Arity mismatch between split and expected_tasks is fatal.
  util::write_file(dir + ".bad.jsonl",
                   R"({"id": "r1", "query": "q", "split": "Three",)"
                   R"( "expected_tasks": ["a"], "modality_in": [],)"
                   R"( "modality_out": []})"
                   "\n");
  CHECK_THROWS_AS(evalbench::load_bench(dir + ".bad.jsonl"), ParseError);

  evalbench::RunOutcome o;
  o.record_id = "r1";
  o.selected_tasks = list({"a", "b"});
  o.plan_order = err_list();
  o.output_ok = Mark::Err;
  o.t_select_ms = 1234;
  util::write_file(dir + ".out.jsonl",
                   "# comment\n" + evalbench::outcome_to_json(o).dump() + "\n");
  auto outs = evalbench::load_outcomes(dir + ".out.jsonl");
  REQUIRE(outs.size() == 1);
  CHECK(outs[0].record_id == "r1");
  CHECK(outs[0].selected_tasks == o.selected_tasks);
  CHECK(outs[0].plan_order.err);
  CHECK(outs[0].output_ok == Mark::Err);
  CHECK(outs[0].t_select_ms == 1234);
}

TEST_CASE("evaluate pairs records by id and demands totality") {
  evalbench::BenchRecord rec;
  rec.id = "only";
  rec.query = "q";
  rec.split = Split::Single;
  rec.expected_tasks = {"asr"};

  evalbench::RunOutcome out;
  out.record_id = "only";
  out.selected_tasks = list({"asr"});
  out.plan_order = list({"asr"});
  out.output_ok = Mark::One;

  evalbench::EvalReport report = evalbench::evaluate({rec}, {out});
  CHECK(report.quadrants.tt == 1);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].first == "only");

  CHECK_THROWS_AS(evalbench::evaluate({rec}, {}), Error);
  CHECK_THROWS_AS(evalbench::evaluate({rec}, {out, out}), Error);
}

TEST_CASE("the 100-row fixture reproduces the frozen numbers") {
  auto bench = evalbench::load_bench(std::string(HIVE_SOURCE_ROOT) +
                                     "/fixtures/eval/hive100.bench.jsonl");
  auto outcomes = evalbench::load_outcomes(std::string(HIVE_SOURCE_ROOT) +
                                           "/fixtures/eval/hive100.outcomes.jsonl");
  REQUIRE(bench.size() == 100);
  REQUIRE(outcomes.size() == 100);
  evalbench::EvalReport report = evalbench::evaluate(bench, outcomes);

  CHECK(util::two_decimals(report.table.overall.ts.mean) == "0.74");
  CHECK(util::two_decimals(report.table.overall.fot.mean) == "0.73");
  CHECK(util::two_decimals(report.table.overall.o.mean) == "0.62");
  CHECK(report.table.overall.ts.numeric == 97);
  CHECK(report.table.overall.o.numeric == 94);

  CHECK(report.quadrants.tt == 58);
  CHECK(report.quadrants.tb == 10);
  CHECK(report.quadrants.bt == 0);
  CHECK(report.quadrants.bb == 26);
  CHECK(report.quadrants.err == 6);

  CHECK(report.failures.err_top == 0);
  CHECK(report.failures.top_err == 3);
  CHECK(report.failures.bot_err == 0);
  CHECK(report.failures.err_err == 3);
  CHECK(report.failures.total() == 6);

  CHECK(util::two_decimals(report.latency.by_split.at(Split::Single).mean_s) ==
        "4.28");
  CHECK(util::two_decimals(report.latency.by_split.at(Split::Two).mean_s) == "5.02");
  CHECK(util::two_decimals(report.latency.by_split.at(Split::Three).mean_s) ==
        "6.40");
  CHECK(util::two_decimals(report.latency.overall.mean_s) == "5.05");

  std::string text = evalbench::render_text(report);
  CHECK(text.find("TT=58 TB=10 BT=0 BB=26 Err=6 (sum 100)") != std::string::npos);
  CHECK(text.find("(Err,T)=0 (T,Err)=3 (B,Err)=0 (Err,Err)=3 (total 6)") !=
        std::string::npos);
  CHECK(text.find("overall  ts=0.74  fot=0.73  o=0.62") != std::string::npos);
}

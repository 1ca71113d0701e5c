#include "hive/evalbench.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "hive/errors.hpp"
#include "hive/util.hpp"

namespace hive::evalbench {

const char* split_name(Split s) {
  switch (s) {
    case Split::Single: return "Single";
    case Split::Two: return "Two";
    case Split::Three: return "Three";
  }
  return "?";
}

Split split_from_name(std::string_view name) {
  if (name == "Single") return Split::Single;
  if (name == "Two") return Split::Two;
  if (name == "Three") return Split::Three;
  throw ParseError("unknown split: " + std::string(name));
}

bool is_err(Mark m) { return m == Mark::Err; }

nlohmann::json mark_to_json(Mark m) {
  switch (m) {
    case Mark::Zero: return 0;
    case Mark::One: return 1;
    case Mark::Err: return "Err";
  }
  return nullptr;
}

Mark mark_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) {
    auto v = j.get<std::int64_t>();
    if (v == 0) return Mark::Zero;
    if (v == 1) return Mark::One;
  } else if (j.is_string() && j.get<std::string>() == "Err") {
    return Mark::Err;
  }
  throw ParseError("mark must be 0, 1 or \"Err\", got " + j.dump());
}

Mark score_ts(const std::vector<std::string>& expected, const ListOrErr& selected) {
  if (selected.err) return Mark::Err;
  std::set<std::string> e(expected.begin(), expected.end());
  std::set<std::string> s(selected.items.begin(), selected.items.end());
  return e == s ? Mark::One : Mark::Zero;
}

Mark score_fot(const std::vector<std::string>& expected, const ListOrErr& plan,
               Mark ts, bool couple_fot) {
  if (plan.err) return Mark::Err;
  if (couple_fot && ts == Mark::Zero) return Mark::Zero;
  return plan.items == expected ? Mark::One : Mark::Zero;
}

Mark score_o(const std::optional<Mark>& verdict, bool run_erred) {
  if (verdict) return *verdict;
  if (run_erred) return Mark::Err;
  throw MissingVerdict("record lacks an output verdict and did not err");
}

ScoreRow score(const BenchRecord& record, const RunOutcome& outcome,
               const EvalConfig& cfg) {
  ScoreRow row;
  row.ts = score_ts(record.expected_tasks, outcome.selected_tasks);
  row.fot = score_fot(record.expected_tasks, outcome.plan_order, row.ts,
                      cfg.couple_fot);
  std::optional<Mark> verdict = outcome.output_ok;
  if (!verdict && record.output_verdict) verdict = record.output_verdict;
  row.o = score_o(verdict, outcome.selected_tasks.err || outcome.plan_order.err);
  return row;
}

namespace {

struct Accumulator {
  std::size_t ones = 0, numeric = 0, errs = 0;

  void add(Mark m, bool err_as_zero) {
    if (m == Mark::Err) {
      ++errs;
      if (err_as_zero) ++numeric;  // counted as 0
      return;
    }
    ++numeric;
    if (m == Mark::One) ++ones;
  }

  MetricAggregate finish() const {
    MetricAggregate agg;
    agg.numeric = numeric;
    agg.errs = errs;
    agg.mean = numeric ? static_cast<double>(ones) / numeric : 0.0;
    return agg;
  }
};

struct RowAccumulator {
  Accumulator ts, fot, o;
  std::size_t rows = 0;

  void add(const ScoreRow& r, bool err_as_zero) {
    ts.add(r.ts, err_as_zero);
    fot.add(r.fot, err_as_zero);
    o.add(r.o, err_as_zero);
    ++rows;
  }

  AggregateRow finish() const {
    return {ts.finish(), fot.finish(), o.finish(), rows};
  }
};

}  // namespace

AggregateTable aggregate(const std::vector<std::pair<Split, ScoreRow>>& rows,
                         const EvalConfig& cfg) {
  if (rows.empty()) throw Error("aggregate over zero rows");
  std::map<Split, RowAccumulator> split_acc;
  RowAccumulator overall;
  for (const auto& [split, row] : rows) {
    split_acc[split].add(row, cfg.err_as_zero);
    overall.add(row, cfg.err_as_zero);
  }
  AggregateTable table;
  for (const auto& [split, acc] : split_acc) table.by_split[split] = acc.finish();
  table.overall = overall.finish();
  return table;
}

Quadrants trustworthiness(const std::vector<ScoreRow>& rows) {
  Quadrants q;
  for (const ScoreRow& r : rows) {
    bool j_err = is_err(r.ts) || is_err(r.fot);
    if (j_err || is_err(r.o)) {
      ++q.err;
      continue;
    }
    bool j = r.ts == Mark::One && r.fot == Mark::One;
    bool o = r.o == Mark::One;
    if (j && o)
      ++q.tt;
    else if (j && !o)
      ++q.tb;
    else if (!j && o)
      ++q.bt;
    else
      ++q.bb;
  }
  return q;
}

FailureCells failure_table(const std::vector<ScoreRow>& rows) {
  FailureCells cells;
  for (const ScoreRow& r : rows) {
    bool j_err = is_err(r.ts) || is_err(r.fot);
    bool o_err = is_err(r.o);
    if (!j_err && !o_err) continue;
    if (j_err && r.o == Mark::One)
      ++cells.err_top;
    else if (j_err)
      ++cells.err_err;  // output Err or 0 alongside a justification Err
    else if (r.ts == Mark::One && r.fot == Mark::One)
      ++cells.top_err;
    else
      ++cells.bot_err;
  }
  return cells;
}

LatencySummary latency_summary(
    const std::vector<std::pair<Split, std::optional<std::int64_t>>>& timings) {
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
  };
  std::map<Split, Acc> split_acc;
  Acc overall;
  for (const auto& [split, t] : timings) {
    if (!t) continue;
    double s = static_cast<double>(*t) / 1000.0;
    split_acc[split].sum += s;
    split_acc[split].n += 1;
    overall.sum += s;
    overall.n += 1;
  }
  LatencySummary out;
  for (const auto& [split, acc] : split_acc)
    out.by_split[split] = {acc.n ? acc.sum / acc.n : 0.0, acc.n};
  out.overall = {overall.n ? overall.sum / overall.n : 0.0, overall.n};
  return out;
}

EvalReport evaluate(const std::vector<BenchRecord>& bench,
                    const std::vector<RunOutcome>& outcomes,
                    const EvalConfig& cfg) {
  std::map<std::string, const RunOutcome*> by_id;
  for (const RunOutcome& o : outcomes) {
    if (!by_id.emplace(o.record_id, &o).second)
      throw Error("duplicate outcome for record " + o.record_id);
  }
  EvalReport report;
  std::vector<std::pair<Split, ScoreRow>> split_rows;
  std::vector<ScoreRow> bare_rows;
  std::vector<std::pair<Split, std::optional<std::int64_t>>> timings;
  for (const BenchRecord& rec : bench) {
    auto it = by_id.find(rec.id);
    if (it == by_id.end()) throw Error("no outcome for record " + rec.id);
    ScoreRow row = score(rec, *it->second, cfg);
    report.rows.emplace_back(rec.id, row);
    split_rows.emplace_back(rec.split, row);
    bare_rows.push_back(row);
    timings.emplace_back(rec.split, it->second->t_select_ms);
  }
  report.table = aggregate(split_rows, cfg);
  report.quadrants = trustworthiness(bare_rows);
  report.failures = failure_table(bare_rows);
  report.latency = latency_summary(timings);
  if (report.quadrants.total() != bench.size())
    throw Error("quadrant accounting does not sum to the record count");
  if (report.failures.total() != report.quadrants.err)
    throw Error("failure cells do not sum to the Err-involved count");
  return report;
}

namespace {

std::string mean_or_dash(const MetricAggregate& m) {
  return m.numeric ? util::two_decimals(m.mean) : std::string("-");
}

void render_row(std::ostringstream& out, const std::string& label,
                const AggregateRow& row) {
  out << "  " << label;
  for (std::size_t i = label.size(); i < 9; ++i) out << ' ';
  out << "ts=" << mean_or_dash(row.ts) << "  fot=" << mean_or_dash(row.fot)
      << "  o=" << mean_or_dash(row.o) << "  errs=" << row.ts.errs << "/"
      << row.fot.errs << "/" << row.o.errs << "  n=" << row.rows << "\n";
}

}  // namespace

std::string render_text(const EvalReport& report, const EvalConfig& cfg) {
  std::ostringstream out;
  out << "== task selection / flow / output ==\n";
  for (const auto& [split, row] : report.table.by_split)
    render_row(out, split_name(split), row);
  render_row(out, "overall", report.table.overall);
  out << (cfg.err_as_zero ? "  (Err rows counted as 0 in means)\n"
                          : "  (Err rows excluded from denominators)\n");
  const Quadrants& q = report.quadrants;
  out << "== trustworthiness ==\n"
      << "  TT=" << q.tt << " TB=" << q.tb << " BT=" << q.bt << " BB=" << q.bb
      << " Err=" << q.err << " (sum " << q.total() << ")\n";
  const FailureCells& f = report.failures;
  out << "== failure cells ==\n"
      << "  (Err,T)=" << f.err_top << " (T,Err)=" << f.top_err
      << " (B,Err)=" << f.bot_err << " (Err,Err)=" << f.err_err << " (total "
      << f.total() << ")\n";
  out << "== latency seconds ==\n";
  for (const auto& [split, row] : report.latency.by_split)
    out << "  " << split_name(split) << " " << util::two_decimals(row.mean_s)
        << " (n=" << row.count << ")\n";
  out << "  overall " << util::two_decimals(report.latency.overall.mean_s)
      << " (n=" << report.latency.overall.count << ")\n";
  return out.str();
}

nlohmann::json to_json(const EvalReport& report) {
  auto agg_json = [](const AggregateRow& row) {
    nlohmann::json j;
    j["ts"] = {{"mean", row.ts.mean}, {"numeric", row.ts.numeric}, {"errs", row.ts.errs}};
    j["fot"] = {{"mean", row.fot.mean}, {"numeric", row.fot.numeric}, {"errs", row.fot.errs}};
    j["o"] = {{"mean", row.o.mean}, {"numeric", row.o.numeric}, {"errs", row.o.errs}};
    j["rows"] = row.rows;
    return j;
  };
  nlohmann::json j;
  nlohmann::json by_split = nlohmann::json::object();
  for (const auto& [split, row] : report.table.by_split)
    by_split[split_name(split)] = agg_json(row);
  j["by_split"] = std::move(by_split);
  j["overall"] = agg_json(report.table.overall);
  j["quadrants"] = {{"TT", report.quadrants.tt},
                    {"TB", report.quadrants.tb},
                    {"BT", report.quadrants.bt},
                    {"BB", report.quadrants.bb},
                    {"Err", report.quadrants.err}};
  j["failure_cells"] = {{"err_top", report.failures.err_top},
                        {"top_err", report.failures.top_err},
                        {"bot_err", report.failures.bot_err},
                        {"err_err", report.failures.err_err}};
  nlohmann::json latency = nlohmann::json::object();
  for (const auto& [split, row] : report.latency.by_split)
    latency[split_name(split)] = {{"mean_s", row.mean_s}, {"count", row.count}};
  latency["overall"] = {{"mean_s", report.latency.overall.mean_s},
                        {"count", report.latency.overall.count}};
  j["latency"] = std::move(latency);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [id, row] : report.rows)
    rows.push_back({{"id", id},
                    {"ts", mark_to_json(row.ts)},
                    {"fot", mark_to_json(row.fot)},
                    {"o", mark_to_json(row.o)}});
  j["rows"] = std::move(rows);
  return j;
}

namespace {

// Shared JSONL walker: parsed object + 1-based line number per record.
template <typename Fn>
void for_each_jsonl(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = util::trim(line);
    if (t.empty() || t[0] == '#') continue;
    nlohmann::json j = nlohmann::json::parse(t, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw ParseError("malformed JSON record in " + path, line_no);
    fn(j, line_no);
  }
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* key,
                                     std::size_t line_no) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const auto& v = j.at(key);
  if (!v.is_array()) throw ParseError(std::string(key) + " must be a list", line_no);
  for (const auto& item : v) {
    if (!item.is_string())
      throw ParseError(std::string(key) + " must hold strings", line_no);
    out.push_back(item.get<std::string>());
  }
  return out;
}

ListOrErr list_or_err(const nlohmann::json& j, const char* key,
                      std::size_t line_no) {
  ListOrErr out;
  if (!j.contains(key)) throw ParseError(std::string("missing ") + key, line_no);
  const auto& v = j.at(key);
  if (v.is_string() && v.get<std::string>() == "Err") {
    out.err = true;
    return out;
  }
  if (!v.is_array())
    throw ParseError(std::string(key) + " must be a list or \"Err\"", line_no);
  for (const auto& item : v) {
    if (!item.is_string())
      throw ParseError(std::string(key) + " must hold strings", line_no);
    out.items.push_back(item.get<std::string>());
  }
  return out;
}

std::size_t split_arity(Split s) {
  switch (s) {
    case Split::Single: return 1;
    case Split::Two: return 2;
    case Split::Three: return 3;
  }
  return 0;
}

}  // namespace

std::vector<BenchRecord> load_bench(const std::string& path) {
  std::vector<BenchRecord> records;
  for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line_no) {
    BenchRecord r;
    try {
      r.id = j.at("id").get<std::string>();
      r.query = j.at("query").get<std::string>();
      r.split = split_from_name(j.at("split").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bench record: ") + e.what(), line_no);
    }
    r.expected_tasks = string_list(j, "expected_tasks", line_no);
    if (r.expected_tasks.size() != split_arity(r.split))
      throw ParseError("expected_tasks arity does not match split " +
                           std::string(split_name(r.split)),
                       line_no);
    r.modality_in = string_list(j, "modality_in", line_no);
    r.modality_out = string_list(j, "modality_out", line_no);
    if (j.contains("output_verdict"))
      r.output_verdict = mark_from_json(j.at("output_verdict"));
    if (j.contains("expect_contains"))
      r.expect_contains = j.at("expect_contains").get<std::string>();
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<RunOutcome> load_outcomes(const std::string& path) {
  std::vector<RunOutcome> outcomes;
  for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line_no) {
    RunOutcome o;
    if (!j.contains("record_id") || !j.at("record_id").is_string())
      throw ParseError("outcome lacks record_id", line_no);
    o.record_id = j.at("record_id").get<std::string>();
    o.selected_tasks = list_or_err(j, "selected_tasks", line_no);
    o.plan_order = list_or_err(j, "plan_order", line_no);
    if (j.contains("output_ok")) o.output_ok = mark_from_json(j.at("output_ok"));
    if (j.contains("t_select_ms")) {
      if (!j.at("t_select_ms").is_number_integer())
        throw ParseError("t_select_ms must be an integer", line_no);
      o.t_select_ms = j.at("t_select_ms").get<std::int64_t>();
    }
    outcomes.push_back(std::move(o));
  });
  return outcomes;
}

nlohmann::json outcome_to_json(const RunOutcome& o) {
  nlohmann::json j;
  j["record_id"] = o.record_id;
  j["selected_tasks"] =
      o.selected_tasks.err ? nlohmann::json("Err") : nlohmann::json(o.selected_tasks.items);
  j["plan_order"] =
      o.plan_order.err ? nlohmann::json("Err") : nlohmann::json(o.plan_order.items);
  if (o.output_ok) j["output_ok"] = mark_to_json(*o.output_ok);
  if (o.t_select_ms) j["t_select_ms"] = *o.t_select_ms;
  return j;
}

}  // namespace hive::evalbench

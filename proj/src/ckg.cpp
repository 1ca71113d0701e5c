#include "hive/ckg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hive/errors.hpp"
#include "hive/util.hpp"

namespace hive::ckg {

namespace {

const std::pair<const char*, NodeKind> kKinds[] = {
    {"model", NodeKind::Model},         {"task", NodeKind::Task},
    {"benchmark", NodeKind::Benchmark}, {"metric", NodeKind::Metric},
    {"license", NodeKind::License},     {"organization", NodeKind::Organization},
    {"language", NodeKind::Language},   {"snippet", NodeKind::Snippet},
    {"result", NodeKind::Result},
};

const std::pair<const char*, EdgeKind> kEdges[] = {
    {"supports_task", EdgeKind::SupportsTask},
    {"has_license", EdgeKind::HasLicense},
    {"has_size_bytes", EdgeKind::HasSizeBytes},
    {"authored_by", EdgeKind::AuthoredBy},
    {"covers_language", EdgeKind::CoversLanguage},
    {"has_snippet", EdgeKind::HasSnippet},
    {"reports_result", EdgeKind::ReportsResult},
    {"result_on_benchmark", EdgeKind::ResultOnBenchmark},
    {"result_metric", EdgeKind::ResultMetric},
    {"result_value", EdgeKind::ResultValue},
    {"result_direction", EdgeKind::ResultDirection},
};

// Metrics where smaller is better; everything else defaults to HigherBetter.
const char* kLowerBetter[] = {"wer", "cer", "perplexity", "mae", "rmse", "fid"};

}  // namespace

const char* kind_name(NodeKind k) {
  for (const auto& [name, kind] : kKinds)
    if (kind == k) return name;
  return "?";
}

NodeKind kind_from_name(std::string_view name) {
  for (const auto& [n, kind] : kKinds)
    if (name == n) return kind;
  throw ParseError("unknown node kind: " + std::string(name));
}

std::string NodeId::to_string() const {
  return std::string(kind_name(kind)) + ":" + local_name;
}

NodeId NodeId::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw ParseError("node id missing kind prefix: " + std::string(text));
  NodeKind kind = kind_from_name(text.substr(0, colon));
  std::string local(text.substr(colon + 1));
  if (util::trim(local).empty())
    throw ParseError("node id has empty local name: " + std::string(text));
  return NodeId{kind, local};
}

const char* edge_name(EdgeKind e) {
  for (const auto& [name, edge] : kEdges)
    if (edge == e) return name;
  return "?";
}

EdgeKind edge_from_name(std::string_view name) {
  for (const auto& [n, edge] : kEdges)
    if (name == n) return edge;
  throw ParseError("unknown predicate: " + std::string(name));
}

std::strong_ordering compare_objects(const Object& a, const Object& b) {
  if (a.index() != b.index()) return a.index() <=> b.index();
  if (std::holds_alternative<NodeId>(a))
    return std::get<NodeId>(a) <=> std::get<NodeId>(b);
  if (std::holds_alternative<std::string>(a))
    return std::get<std::string>(a) <=> std::get<std::string>(b);
  if (std::holds_alternative<std::int64_t>(a))
    return std::get<std::int64_t>(a) <=> std::get<std::int64_t>(b);
  double x = std::get<double>(a), y = std::get<double>(b);
  if (x < y) return std::strong_ordering::less;
  if (x > y) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Direction metric_direction(std::string_view metric) {
  std::string low = util::to_lower(metric);
  for (const char* m : kLowerBetter)
    if (low == m) return Direction::LowerBetter;
  return Direction::HigherBetter;
}

namespace {

struct TripleLess {
  bool operator()(const Triple& a, const Triple& b) const {
    if (auto c = a.subject <=> b.subject; c != 0) return c < 0;
    if (a.predicate != b.predicate) return a.predicate < b.predicate;
    return compare_objects(a.object, b.object) < 0;
  }
};

void check_arity(const Triple& t, std::size_t line_no = 0) {
  switch (t.predicate) {
    case EdgeKind::HasSizeBytes: {
      if (!std::holds_alternative<std::int64_t>(t.object))
        throw ArityViolation("has_size_bytes requires an integer object", line_no);
      if (std::get<std::int64_t>(t.object) < 0)
        throw ArityViolation("has_size_bytes must be non-negative", line_no);
      return;
    }
    case EdgeKind::ResultValue: {
      if (!std::holds_alternative<double>(t.object))
        throw ArityViolation("result_value requires a float object", line_no);
      if (!std::isfinite(std::get<double>(t.object)))
        throw ArityViolation("result_value must be finite", line_no);
      return;
    }
    case EdgeKind::ResultDirection: {
      if (!std::holds_alternative<std::string>(t.object))
        throw ArityViolation("result_direction requires a string object", line_no);
      const std::string& v = std::get<std::string>(t.object);
      if (v != "higher_better" && v != "lower_better")
        throw ArityViolation("result_direction must be higher_better or lower_better",
                             line_no);
      return;
    }
    default:
      if (!std::holds_alternative<NodeId>(t.object))
        throw ArityViolation(std::string(edge_name(t.predicate)) +
                                 " requires a node object",
                             line_no);
  }
}

}  // namespace

void CapabilityGraph::add(const Triple& t) {
  check_arity(t);
  if (util::trim(t.subject.local_name).empty())
    throw ArityViolation("subject has empty local name");
  // Idempotent insert: scan the subject's existing triples.
  auto it = subj_index_.find(t.subject);
  if (it != subj_index_.end()) {
    for (std::size_t idx : it->second)
      if (triples_[idx] == t) return;
  }
  triples_.push_back(t);
  subj_index_[t.subject].push_back(triples_.size() - 1);
  pred_index_[t.predicate].push_back(triples_.size() - 1);
}

std::vector<const Triple*> CapabilityGraph::by_subject(const NodeId& s) const {
  std::vector<const Triple*> out;
  auto it = subj_index_.find(s);
  if (it == subj_index_.end()) return out;
  out.reserve(it->second.size());
  for (std::size_t idx : it->second) out.push_back(&triples_[idx]);
  return out;
}

std::vector<const Triple*> CapabilityGraph::by_predicate(EdgeKind p) const {
  std::vector<const Triple*> out;
  auto it = pred_index_.find(p);
  if (it == pred_index_.end()) return out;
  out.reserve(it->second.size());
  for (std::size_t idx : it->second) out.push_back(&triples_[idx]);
  return out;
}

bool CapabilityGraph::contains_entity(const NodeId& n) const {
  if (subj_index_.count(n)) return true;
  for (const Triple& t : triples_)
    if (std::holds_alternative<NodeId>(t.object) && std::get<NodeId>(t.object) == n)
      return true;
  return false;
}

ModelRecord CapabilityGraph::model_record(const NodeId& model) const {
  ModelRecord rec;
  rec.model = model;
  for (const Triple* t : by_subject(model)) {
    switch (t->predicate) {
      case EdgeKind::SupportsTask:
        rec.tasks.push_back(std::get<NodeId>(t->object));
        break;
      case EdgeKind::HasLicense:
        rec.license = std::get<NodeId>(t->object).local_name;
        break;
      case EdgeKind::HasSizeBytes:
        rec.size_bytes = std::get<std::int64_t>(t->object);
        break;
      case EdgeKind::HasSnippet:
        rec.snippet = std::get<NodeId>(t->object);
        break;
      default:
        break;
    }
  }
  std::sort(rec.tasks.begin(), rec.tasks.end());
  rec.results = results_for(model);
  return rec;
}

std::vector<ModelRecord> CapabilityGraph::models_for_task(const NodeId& task) const {
  std::vector<NodeId> models;
  for (const Triple* t : by_predicate(EdgeKind::SupportsTask))
    if (std::get<NodeId>(t->object) == task) models.push_back(t->subject);
  std::sort(models.begin(), models.end(),
            [](const NodeId& a, const NodeId& b) { return a.local_name < b.local_name; });
  models.erase(std::unique(models.begin(), models.end()), models.end());
  std::vector<ModelRecord> out;
  out.reserve(models.size());
  for (const NodeId& m : models) out.push_back(model_record(m));
  return out;
}

std::vector<BenchmarkResult> CapabilityGraph::results_for(
    const NodeId& model, const std::optional<NodeId>& benchmark) const {
  std::vector<BenchmarkResult> out;
  for (const Triple* t : by_subject(model)) {
    if (t->predicate != EdgeKind::ReportsResult) continue;
    const NodeId& result_node = std::get<NodeId>(t->object);
    BenchmarkResult r;
    int have = 0;
    for (const Triple* rt : by_subject(result_node)) {
      switch (rt->predicate) {
        case EdgeKind::ResultOnBenchmark:
          r.benchmark = std::get<NodeId>(rt->object);
          have |= 1;
          break;
        case EdgeKind::ResultMetric:
          r.metric = std::get<NodeId>(rt->object);
          have |= 2;
          break;
        case EdgeKind::ResultValue:
          r.value = std::get<double>(rt->object);
          have |= 4;
          break;
        case EdgeKind::ResultDirection:
          r.direction = std::get<std::string>(rt->object) == "lower_better"
                            ? Direction::LowerBetter
                            : Direction::HigherBetter;
          have |= 8;
          break;
        default:
          break;
      }
    }
    if (have != 15) continue;  // incomplete reification; validate() rejects these
    if (benchmark && !(r.benchmark == *benchmark)) continue;
    out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const BenchmarkResult& a, const BenchmarkResult& b) {
    if (a.benchmark != b.benchmark) return a.benchmark < b.benchmark;
    return a.metric < b.metric;
  });
  return out;
}

std::optional<NodeId> CapabilityGraph::snippet_for(const NodeId& model) const {
  for (const Triple* t : by_subject(model))
    if (t->predicate == EdgeKind::HasSnippet) return std::get<NodeId>(t->object);
  return std::nullopt;
}

Stats CapabilityGraph::stats() const {
  Stats s;
  s.triples = triples_.size();
  std::set<NodeId> entities;
  for (const Triple& t : triples_) {
    entities.insert(t.subject);
    if (std::holds_alternative<NodeId>(t.object))
      entities.insert(std::get<NodeId>(t.object));
    s.by_predicate[edge_name(t.predicate)]++;
  }
  s.entities = entities.size();
  for (const NodeId& n : entities) s.by_kind[kind_name(n.kind)]++;
  return s;
}

void CapabilityGraph::validate() const {
  for (const Triple* t : by_predicate(EdgeKind::ReportsResult)) {
    const NodeId& result_node = std::get<NodeId>(t->object);
    int on_benchmark = 0, metric = 0, value = 0, direction = 0;
    for (const Triple* rt : by_subject(result_node)) {
      switch (rt->predicate) {
        case EdgeKind::ResultOnBenchmark: ++on_benchmark; break;
        case EdgeKind::ResultMetric: ++metric; break;
        case EdgeKind::ResultValue: ++value; break;
        case EdgeKind::ResultDirection: ++direction; break;
        default: break;
      }
    }
    if (on_benchmark != 1 || metric != 1 || value != 1 || direction != 1)
      throw Error("result node " + result_node.to_string() +
                  " is not fully reified (expected exactly one of each auxiliary triple)");
  }
}

namespace {

nlohmann::json object_to_json(const Object& o, std::string& ot) {
  if (std::holds_alternative<NodeId>(o)) {
    ot = "node";
    return std::get<NodeId>(o).to_string();
  }
  if (std::holds_alternative<std::string>(o)) {
    ot = "str";
    return std::get<std::string>(o);
  }
  if (std::holds_alternative<std::int64_t>(o)) {
    ot = "int";
    return std::get<std::int64_t>(o);
  }
  ot = "float";
  return std::get<double>(o);
}

}  // namespace

void CapabilityGraph::serialize(std::ostream& out) const {
  for (const Triple& t : triples_) {
    std::string ot;
    nlohmann::json o = object_to_json(t.object, ot);
    nlohmann::json line = {{"s", t.subject.to_string()},
                           {"p", edge_name(t.predicate)},
                           {"o", o},
                           {"ot", ot}};
    out << line.dump() << "\n";
  }
}

CapabilityGraph load_graph(std::istream& in) {
  CapabilityGraph g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = util::trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(trimmed);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed triple line: ") + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("s") || !j.contains("p") || !j.contains("o") ||
        !j.contains("ot"))
      throw ParseError("triple line missing s/p/o/ot", line_no);
    Triple t;
    try {
      t.subject = NodeId::parse(j.at("s").get<std::string>());
      t.predicate = edge_from_name(j.at("p").get<std::string>());
    } catch (ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    const std::string ot = j.at("ot").get<std::string>();
    try {
      if (ot == "node")
        t.object = NodeId::parse(j.at("o").get<std::string>());
      else if (ot == "str")
        t.object = j.at("o").get<std::string>();
      else if (ot == "int")
        t.object = j.at("o").get<std::int64_t>();
      else if (ot == "float")
        t.object = j.at("o").get<double>();
      else
        throw ParseError("unknown object type tag: " + ot);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("object does not match ot tag: ") + e.what(),
                       line_no);
    } catch (ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    try {
      check_arity(t, line_no);
    } catch (ArityViolation&) {
      throw;
    }
    g.add(t);
  }
  g.validate();
  return g;
}

CapabilityGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read graph file: " + path);
  return load_graph(in);
}

}  // namespace hive::ckg

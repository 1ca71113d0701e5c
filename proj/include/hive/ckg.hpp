#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hive::ckg {

enum class NodeKind {
  Model,
  Task,
  Benchmark,
  Metric,
  License,
  Organization,
  Language,
  Snippet,
  Result,
};

const char* kind_name(NodeKind k);
NodeKind kind_from_name(std::string_view name);  // throws ParseError

struct NodeId {
  NodeKind kind;
  std::string local_name;  // non-empty, not whitespace-only

  auto operator<=>(const NodeId&) const = default;
  std::string to_string() const;  // "kind:local_name"
  static NodeId parse(std::string_view text);
};

enum class EdgeKind {
  SupportsTask,
  HasLicense,
  HasSizeBytes,
  AuthoredBy,
  CoversLanguage,
  HasSnippet,
  ReportsResult,
  ResultOnBenchmark,
  ResultMetric,
  ResultValue,
  ResultDirection,
};

const char* edge_name(EdgeKind e);
EdgeKind edge_from_name(std::string_view name);  // throws ParseError

// Object payload: a node reference, a string, an integer, or a float.
// The predicate fixes which alternative is legal.
using Object = std::variant<NodeId, std::string, std::int64_t, double>;

std::strong_ordering compare_objects(const Object& a, const Object& b);

struct Triple {
  NodeId subject;
  EdgeKind predicate;
  Object object;

  bool operator==(const Triple&) const = default;
};

enum class Direction { HigherBetter, LowerBetter };

// Direction for a metric name; defaults to HigherBetter, with a fixed
// exception list for error-style metrics. Case-insensitive.
Direction metric_direction(std::string_view metric);

struct BenchmarkResult {
  NodeId benchmark;
  NodeId metric;
  double value = 0.0;
  Direction direction = Direction::HigherBetter;

  bool operator==(const BenchmarkResult&) const = default;
};

struct ModelRecord {
  NodeId model;
  std::vector<NodeId> tasks;
  std::optional<std::string> license;
  std::optional<std::int64_t> size_bytes;
  std::vector<BenchmarkResult> results;
  std::optional<NodeId> snippet;
};

struct Stats {
  std::size_t triples = 0;
  std::size_t entities = 0;
  std::map<std::string, std::size_t> by_kind;       // entity count per node kind
  std::map<std::string, std::size_t> by_predicate;  // triple count per predicate
};

// In-memory triple store with subject and (predicate, object) indexes.
// Insertion is idempotent; readers treat a loaded graph as immutable.
// Concurrent mutation must be serialized by the caller.
class CapabilityGraph {
 public:
  // Throws ArityViolation when the object alternative does not match the
  // predicate. Duplicate triples are ignored.
  void add(const Triple& t);

  const std::vector<Triple>& triples() const { return triples_; }

  std::vector<const Triple*> by_subject(const NodeId& s) const;
  std::vector<const Triple*> by_predicate(EdgeKind p) const;

  bool contains_entity(const NodeId& n) const;

  // Models supporting `task`, ascending by local_name. Unknown task -> empty.
  std::vector<ModelRecord> models_for_task(const NodeId& task) const;

  ModelRecord model_record(const NodeId& model) const;

  // All benchmark results for `model`; optionally restricted to one benchmark.
  std::vector<BenchmarkResult> results_for(
      const NodeId& model, const std::optional<NodeId>& benchmark = {}) const;

  std::optional<NodeId> snippet_for(const NodeId& model) const;

  Stats stats() const;

  // Result-node reification completeness: every reports_result target has
  // exactly one of each auxiliary triple. Throws on violation.
  void validate() const;

  void serialize(std::ostream& out) const;

 private:
  std::vector<Triple> triples_;
  std::map<NodeId, std::vector<std::size_t>> subj_index_;
  std::map<EdgeKind, std::vector<std::size_t>> pred_index_;
};

// Line-delimited triple format; '#' lines are comments. Validates on
// completion. Throws ParseError / ArityViolation with line numbers.
CapabilityGraph load_graph(std::istream& in);
CapabilityGraph load_graph_file(const std::string& path);

}  // namespace hive::ckg

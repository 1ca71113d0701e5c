#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hive/ckg.hpp"
#include "hive/nlu.hpp"
#include "hive/planner.hpp"
#include "hive/selection.hpp"

namespace hive::exec {

// Semantic types: text, audio_path, image_path, table, categories, question,
// model_path, other. Argument mapping matches on these names.
struct ParamSpec {
  std::string name;
  std::string semantic_type;
  std::optional<std::string> default_value;

  bool operator==(const ParamSpec&) const = default;
};

// How to call one model. The snippet is opaque; the backend interprets it.
struct ExecutionSpec {
  std::string model_id;
  std::vector<ParamSpec> params;
  std::string output_type = "text";
  std::string snippet;           // may be empty for registry-backed models
  std::string backend = "stub";  // "stub" | "subprocess" | "remote"

  bool operator==(const ExecutionSpec&) const = default;
};

// JSON file: model id -> spec. Models absent here are served by
// fallback_spec.
class SpecStore {
 public:
  SpecStore() = default;
  static SpecStore load(const std::string& path);

  const ExecutionSpec* find(const std::string& model_id) const;
  void put(ExecutionSpec spec);
  std::size_t size() const { return specs_.size(); }

 private:
  std::map<std::string, ExecutionSpec> specs_;
};

// For a model without a snippet of its own: the spec of the first other
// model (ascending local name) supporting the same task that has a snippet
// and a stored spec, with the model_path default rewritten to `model`.
// nullopt when no sibling qualifies.
std::optional<ExecutionSpec> fallback_spec(const ckg::NodeId& model,
                                           const ckg::NodeId& task,
                                           const ckg::CapabilityGraph& graph,
                                           const SpecStore& store);

// Artifact produced by a step (producer >= 0) or seeded from the parsed
// query (producer == -1).
struct ArtifactEntry {
  std::string name;
  std::string semantic_type;
  std::string value;
  int producer = -1;
};

// Data-flow store: later steps read what earlier steps (or the query) wrote.
// Keys are unique; causality holds because entries are appended only after
// the producing step ran.
class Blackboard {
 public:
  void seed(const nlu::ParsedQuery& pq);
  void put(ArtifactEntry entry);  // throws ExecutionError on duplicate name

  const std::vector<ArtifactEntry>& entries() const { return entries_; }
  const ArtifactEntry* by_name(const std::string& name) const;
  // Entry of the given semantic type with the greatest producer index;
  // earliest insertion wins among equals.
  const ArtifactEntry* latest_of_type(const std::string& semantic_type) const;

 private:
  std::vector<ArtifactEntry> entries_;
};

// Binds every parameter of `spec` or throws UnboundParameter. Tiers, first
// match wins: exact artifact name; semantic type (most recent producer);
// trigram cosine >= 0.5 between parameter and artifact names; spec default.
std::map<std::string, std::string> map_arguments(const ExecutionSpec& spec,
                                                 const Blackboard& board);

// Executes one bound call for a model. Implementations throw ExecutionError.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string run(const std::string& model_id,
                          const std::map<std::string, std::string>& args) = 0;
};

// Named deterministic stand-ins for real models (lookup-table ASR/captions,
// head-sentence summaries, digest-named output paths, ...).
class StubBackend : public Backend {
 public:
  explicit StubBackend(std::string name);
  std::string run(const std::string& model_id,
                  const std::map<std::string, std::string>& args) override;
  static const std::vector<std::string>& stub_names();

 private:
  std::string name_;
};

// Runs a command template with "{param}" placeholders; returns its stdout.
class SubprocessBackend : public Backend {
 public:
  explicit SubprocessBackend(std::string command_template);
  std::string run(const std::string& model_id,
                  const std::map<std::string, std::string>& args) override;

 private:
  std::string template_;
};

// POSTs {"model": ..., "args": {...}} to `url`, expects {"text": ...}.
class RemoteBackend : public Backend {
 public:
  explicit RemoteBackend(std::string url);
  std::string run(const std::string& model_id,
                  const std::map<std::string, std::string>& args) override;

 private:
  std::string url_;
};

// JSON file: model id -> {"backend": "stub"|"subprocess"|"remote", ...}.
class BackendRegistry {
 public:
  static BackendRegistry load(const std::string& path);
  void put(const std::string& model_id, std::shared_ptr<Backend> backend);

  // Throws ExecutionError for unregistered models.
  std::string run(const std::string& model_id,
                  const std::map<std::string, std::string>& args);

 private:
  std::map<std::string, std::shared_ptr<Backend>> backends_;
};

// Millisecond clock. VirtualClock makes offline traces reproducible:
// starts at zero, +1 per reading.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() = 0;
};

class VirtualClock : public Clock {
 public:
  std::int64_t now_ms() override { return t_++; }

 private:
  std::int64_t t_ = 0;
};

class SystemClock : public Clock {
 public:
  std::int64_t now_ms() override;
};

struct StepRecord {
  std::string action;
  std::string model_id;
  std::map<std::string, std::string> bound_args;
  std::string output_key;  // "step<N>_<action>"
  std::string output;
  std::string output_type;
  std::int64_t duration_ms = 0;
  std::string status = "Ok";  // "Ok" | "Err"
};

// Full justification record: one data structure drives both execution and
// reporting, so the report cannot diverge from what ran.
struct ExecutionTrace {
  std::string query;
  nlu::ParsedQuery parsed;
  nlu::DomainSubset domains;
  std::vector<std::string> selected_actions;
  planner::Plan plan;
  selection::SelectionResult selection;
  std::vector<StepRecord> steps;
  std::int64_t t_parse_ms = 0;
  std::int64_t t_plan_ms = 0;
  std::int64_t t_select_ms = 0;  // query receipt -> selection done
  std::string final_status = "Ok";  // "Ok" | "Err"
  std::optional<std::string> error;
  std::optional<std::string> final_output;  // last artifact, on success
};

// Runs the plan over a fresh blackboard seeded from `pq`. Specs resolve
// directly or through fallback_spec. Never throws: an unassigned action
// aborts before any step; a failing step is recorded with status Err and
// the rest are skipped.
ExecutionTrace execute_plan(const planner::Plan& plan,
                            const selection::SelectionResult& sel,
                            const nlu::ParsedQuery& pq,
                            const ckg::CapabilityGraph& graph,
                            const SpecStore& specs, BackendRegistry& registry,
                            Clock& clock);

// Deterministic human-readable rendering of the trace.
std::string render_report(const ExecutionTrace& trace);
nlohmann::json to_json(const ExecutionTrace& trace);

}  // namespace hive::exec

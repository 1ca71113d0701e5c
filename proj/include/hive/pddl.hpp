#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace hive::nlu {
struct ParsedQuery;
}

namespace hive::pddl {

struct TypedVar {
  std::string name;  // includes the leading '?'
  std::string type;
  bool operator==(const TypedVar&) const = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<TypedVar> params;
  bool operator==(const PredicateDecl&) const = default;
};

// Positive atom; args are variables ('?x') or constant names.
struct Atom {
  std::string pred;
  std::vector<std::string> args;
  auto operator<=>(const Atom&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedVar> params;
  std::vector<Atom> precondition;  // conjunction of positive atoms
  std::vector<Atom> add_effects;
  std::vector<Atom> del_effects;
  std::vector<std::string> produces;  // artifact tags from the ;; produces: comment
  bool operator==(const ActionSchema&) const = default;
};

struct DomainFile {
  std::string name;
  std::set<std::string> requirements;                     // ":strips", ":typing"
  std::vector<std::pair<std::string, std::string>> types;  // (type, parent)
  std::vector<PredicateDecl> predicates;
  std::vector<ActionSchema> actions;
  bool operator==(const DomainFile&) const = default;

  const ActionSchema* find_action(std::string_view name) const;
};

// Strips/typing subset only. Anything else raises UnsupportedFeature;
// malformed text raises SyntaxError with line/column.
DomainFile parse_domain(std::string_view text);

// Canonical text: two-space indent, lowercase keywords, requirements sorted,
// everything else in stored order. parse_domain(print_domain(d)) == d.
std::string print_domain(const DomainFile& d);

// Union of requirements/types/predicates/actions. Exact duplicate actions
// collapse; same-name actions with different bodies are renamed to
// "<domain>__<action>". Same-name predicate declarations must be identical.
DomainFile merge_domains(const std::vector<DomainFile>& domains);

// Ensure every action declares and adds a 0-ary "done_<name>" marker.
// Idempotent.
void add_done_markers(DomainFile& d);

struct TypedConst {
  std::string name;
  std::string type;
  bool operator==(const TypedConst&) const = default;
};

struct GroundAtom {
  std::string pred;
  std::vector<std::string> args;
  auto operator<=>(const GroundAtom&) const = default;
  std::string to_string() const;
};

struct ProblemFile {
  std::string name;
  std::string domain_name;
  std::vector<TypedConst> objects;
  std::vector<GroundAtom> init;
  std::vector<GroundAtom> goal;
  bool operator==(const ProblemFile&) const = default;
};

std::string print_problem(const ProblemFile& p);

// Artifact modality buckets for query inputs. Unknown extensions are
// documents; the table is deliberately small and fixed.
std::string modality_for_url(std::string_view url);

// Build a problem from the parsed query and the chosen action names: one
// typed constant per input artifact, availability init atoms, and a goal
// conjunction of the selected actions' done markers.
// Throws UnknownAction / NoInputArtifact.
ProblemFile synthesize_problem(const nlu::ParsedQuery& pq,
                               const std::vector<std::string>& selected,
                               const DomainFile& merged);

using Bits = boost::dynamic_bitset<>;

struct GroundAction {
  std::string schema_name;
  std::vector<std::string> args;  // bound objects, parameter order
  Bits pre, add, del;
  std::vector<std::string> produces;
  std::string name() const;  // "schema(a0,a1)"
};

struct GroundedTask {
  std::vector<GroundAtom> atoms;  // lexicographically sorted universe
  Bits init, goal;
  std::vector<GroundAction> actions;

  std::size_t atom_index(const GroundAtom& a) const;  // throws if absent
};

// Enumerate all type-consistent instantiations. Deterministic ordering:
// schemas in domain order, bindings in object-declaration order.
// Throws GroundingExplosion when the action count would exceed the cap.
GroundedTask ground(const DomainFile& d, const ProblemFile& p,
                    std::size_t max_actions = 100000);

}  // namespace hive::pddl

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hive/prompts.hpp"
#include "hive/provider.hpp"

namespace hive::nlu {

// Six-component decomposition of a natural-language query. A parse is valid
// when at least one component is present.
struct ParsedQuery {
  std::optional<std::string> instruction;
  std::optional<std::string> input_text;
  std::optional<std::string> question;
  std::optional<std::string> url;
  std::map<std::string, std::string> data_dict;
  std::vector<std::string> categories;
  bool degraded = false;  // provider parse failed; deterministic fallback used

  bool has_any() const;
  bool operator==(const ParsedQuery&) const = default;
};

nlohmann::json to_json(const ParsedQuery& pq);

// Tolerant JSON reader for provider replies: strips code fences, trims to
// the outermost braces/brackets, and rewrites Python literals (None/True/
// False, single-quoted strings). nullopt when hopeless.
std::optional<nlohmann::json> parse_lenient_json(const std::string& text);

// Deterministic provider-free parse: URL by token shape, question by first
// '?'-sentence, single-quoted categories after an enumeration cue,
// double-quoted input text, instruction = query minus URL.
ParsedQuery fallback_parse(const std::string& query);

struct ParseOptions {
  bool allow_fallback = true;
};

// Provider-backed parse with one repair retry, post-hoc URL containment
// check, and fallback_parse as the safety net. Throws ProviderError only if
// both calls fail at the transport level and fallback is disabled.
ParsedQuery parse_query(const std::string& query, provider::TextCompletion& provider,
                        const prompts::PromptLibrary& lib,
                        const ParseOptions& opts = {});

struct DomainSubset {
  std::vector<std::string> domains;  // canonical registered names, reply order
  std::vector<std::string> warnings;
  bool degraded = false;  // keyword fallback engaged

  bool operator==(const DomainSubset&) const = default;
};

// Maps the instruction onto the registered domain list. Non-registered names
// in the reply are dropped with a warning; an empty outcome falls back to
// stem-keyword matching so an offline pipeline still gets a domain set.
DomainSubset classify_domains(const std::string& instruction,
                              const std::vector<std::string>& registered,
                              provider::TextCompletion& provider,
                              const prompts::PromptLibrary& lib);

// Picks at most three of `actions` (which must be non-empty), preserving
// reply order. One repair retry; then EmptySelection.
std::vector<std::string> select_actions(const std::string& instruction,
                                        const std::vector<std::string>& actions,
                                        provider::TextCompletion& provider,
                                        const prompts::PromptLibrary& lib);

}  // namespace hive::nlu

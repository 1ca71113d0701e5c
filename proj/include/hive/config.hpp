#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

namespace hive::config {

// Effective runtime configuration. Precedence: flags > environment > config
// file > these defaults.
struct Config {
  struct Provider {
    std::string url;
    std::string token;
    bool offline = true;
    std::string fixtures = "fixtures/provider";  // canned-reply directory
  } provider;

  struct Ckg {
    std::string path = "fixtures/ckg/muse.triples";
    std::string specs = "fixtures/ckg/muse.specs.json";
  } ckg;

  struct Planner {
    int max_width = 2;
    std::uint64_t max_expansions = 1'000'000;
  } planner;

  struct Ground {
    std::size_t max_actions = 100'000;
  } ground;

  struct Eval {
    bool err_as_zero = false;
    bool couple_fot = true;
  } eval;

  struct Registry {
    std::string path = "fixtures/exec/registry.json";
  } registry;

  std::string domains_dir = "fixtures/pddl";
  std::string prompts_dir = "fixtures/prompts";
};

// Values set by command-line flags; absent = not given.
struct Overrides {
  std::optional<std::string> provider_url;
  std::optional<std::string> provider_token;
  std::optional<bool> offline;
  std::optional<std::string> fixtures_dir;
  std::optional<std::string> ckg_path;
  std::optional<std::string> specs_path;
  std::optional<int> max_width;
  std::optional<std::uint64_t> max_expansions;
  std::optional<std::size_t> ground_max_actions;
  std::optional<bool> err_as_zero;
  std::optional<bool> couple_fot;
  std::optional<std::string> registry_path;
  std::optional<std::string> domains_dir;
  std::optional<std::string> prompts_dir;
};

// Environment keys: HIVE_PROVIDER_URL, HIVE_PROVIDER_TOKEN, HIVE_OFFLINE.
// `env` is injected for testability; the CLI passes the process environment.
Config load(const std::optional<std::string>& config_file, const Overrides& flags,
            const std::map<std::string, std::string>& env);

nlohmann::json to_json(const Config& cfg);

// Deterministic text block echoed into reports; the token is redacted.
std::string render(const Config& cfg);

}  // namespace hive::config

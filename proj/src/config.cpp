#include "hive/config.hpp"

#include <sstream>

#include "hive/errors.hpp"
#include "hive/util.hpp"

namespace hive::config {

namespace {

bool parse_bool(const std::string& raw, const std::string& where) {
  const std::string v = util::to_lower(util::trim(raw));
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error("invalid boolean for " + where + ": '" + raw + "'");
}

void apply_file(Config& cfg, const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(util::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config file: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config file: top level must be an object");

  auto str = [&](const nlohmann::json& o, const char* k, std::string& out) {
    if (o.contains(k)) out = o.at(k).get<std::string>();
  };
  auto flag = [&](const nlohmann::json& o, const char* k, bool& out) {
    if (o.contains(k)) out = o.at(k).get<bool>();
  };

  try {
    if (j.contains("provider")) {
      const auto& p = j.at("provider");
      str(p, "url", cfg.provider.url);
      str(p, "token", cfg.provider.token);
      flag(p, "offline", cfg.provider.offline);
      str(p, "fixtures", cfg.provider.fixtures);
    }
    if (j.contains("ckg")) {
      const auto& c = j.at("ckg");
      str(c, "path", cfg.ckg.path);
      str(c, "specs", cfg.ckg.specs);
    }
    if (j.contains("planner")) {
      const auto& p = j.at("planner");
      if (p.contains("max_width")) cfg.planner.max_width = p.at("max_width").get<int>();
      if (p.contains("max_expansions"))
        cfg.planner.max_expansions = p.at("max_expansions").get<std::uint64_t>();
    }
    if (j.contains("ground")) {
      const auto& g = j.at("ground");
      if (g.contains("max_actions")) cfg.ground.max_actions = g.at("max_actions").get<std::size_t>();
    }
    if (j.contains("eval")) {
      const auto& e = j.at("eval");
      flag(e, "err_as_zero", cfg.eval.err_as_zero);
      flag(e, "couple_fot", cfg.eval.couple_fot);
    }
    if (j.contains("registry")) {
      str(j.at("registry"), "path", cfg.registry.path);
    }
    str(j, "domains_dir", cfg.domains_dir);
    str(j, "prompts_dir", cfg.prompts_dir);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config file: ") + e.what());
  }
}

void apply_env(Config& cfg, const std::map<std::string, std::string>& env) {
  if (auto it = env.find("HIVE_PROVIDER_URL"); it != env.end()) cfg.provider.url = it->second;
  if (auto it = env.find("HIVE_PROVIDER_TOKEN"); it != env.end()) cfg.provider.token = it->second;
  if (auto it = env.find("HIVE_OFFLINE"); it != env.end())
    cfg.provider.offline = parse_bool(it->second, "HIVE_OFFLINE");
}

void apply_flags(Config& cfg, const Overrides& f) {
  if (f.provider_url) cfg.provider.url = *f.provider_url;
  if (f.provider_token) cfg.provider.token = *f.provider_token;
  if (f.offline) cfg.provider.offline = *f.offline;
  if (f.fixtures_dir) cfg.provider.fixtures = *f.fixtures_dir;
  if (f.ckg_path) cfg.ckg.path = *f.ckg_path;
  if (f.specs_path) cfg.ckg.specs = *f.specs_path;
  if (f.max_width) cfg.planner.max_width = *f.max_width;
  if (f.max_expansions) cfg.planner.max_expansions = *f.max_expansions;
  if (f.ground_max_actions) cfg.ground.max_actions = *f.ground_max_actions;
  if (f.err_as_zero) cfg.eval.err_as_zero = *f.err_as_zero;
  if (f.couple_fot) cfg.eval.couple_fot = *f.couple_fot;
  if (f.registry_path) cfg.registry.path = *f.registry_path;
  if (f.domains_dir) cfg.domains_dir = *f.domains_dir;
  if (f.prompts_dir) cfg.prompts_dir = *f.prompts_dir;
}

}  // namespace

Config load(const std::optional<std::string>& config_file, const Overrides& flags,
            const std::map<std::string, std::string>& env) {
  Config cfg;
  if (config_file) apply_file(cfg, *config_file);
  apply_env(cfg, env);
  apply_flags(cfg, flags);
  if (cfg.planner.max_width < 1 || cfg.planner.max_width > 2)
    throw Error("planner.max_width must be 1 or 2");
  if (cfg.planner.max_expansions == 0) throw Error("planner.max_expansions must be positive");
  if (cfg.ground.max_actions == 0) throw Error("ground.max_actions must be positive");
  return cfg;
}

nlohmann::json to_json(const Config& cfg) {
  return nlohmann::json{
      {"provider",
       {{"url", cfg.provider.url},
        {"token", cfg.provider.token.empty() ? "" : "<redacted>"},
        {"offline", cfg.provider.offline},
        {"fixtures", cfg.provider.fixtures}}},
      {"ckg", {{"path", cfg.ckg.path}, {"specs", cfg.ckg.specs}}},
      {"planner",
       {{"max_width", cfg.planner.max_width}, {"max_expansions", cfg.planner.max_expansions}}},
      {"ground", {{"max_actions", cfg.ground.max_actions}}},
      {"eval", {{"err_as_zero", cfg.eval.err_as_zero}, {"couple_fot", cfg.eval.couple_fot}}},
      {"registry", {{"path", cfg.registry.path}}},
      {"domains_dir", cfg.domains_dir},
      {"prompts_dir", cfg.prompts_dir},
  };
}

std::string render(const Config& cfg) {
  std::ostringstream os;
  os << "== config ==\n";
  os << "  provider.offline=" << (cfg.provider.offline ? "true" : "false");
  os << " provider.url=" << (cfg.provider.url.empty() ? "-" : cfg.provider.url);
  os << " provider.token=" << (cfg.provider.token.empty() ? "-" : "<redacted>");
  os << " provider.fixtures=" << cfg.provider.fixtures << "\n";
  os << "  ckg.path=" << cfg.ckg.path << " ckg.specs=" << cfg.ckg.specs << "\n";
  os << "  planner.max_width=" << cfg.planner.max_width
     << " planner.max_expansions=" << cfg.planner.max_expansions
     << " ground.max_actions=" << cfg.ground.max_actions << "\n";
  os << "  eval.err_as_zero=" << (cfg.eval.err_as_zero ? "true" : "false")
     << " eval.couple_fot=" << (cfg.eval.couple_fot ? "true" : "false") << "\n";
  os << "  registry.path=" << cfg.registry.path << " domains_dir=" << cfg.domains_dir
     << " prompts_dir=" << cfg.prompts_dir << "\n";
  return os.str();
}

}  // namespace hive::config

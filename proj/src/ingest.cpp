#include "hive/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <regex>
#include <set>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "hive/errors.hpp"
#include "hive/util.hpp"

namespace hive::ingest {

namespace {

const std::regex kArxivPattern("^[0-9]{4,}\\.[0-9]{4,5}$");

}  // namespace

ModelCard parse_model_card(const std::string& text) {
  if (!util::starts_with(text, "---"))
    throw ParseError("model card lacks a front-matter header");
  auto first_nl = text.find('\n');
  if (first_nl == std::string::npos)
    throw ParseError("model card front matter never closes");
  std::size_t close = std::string::npos;
  std::size_t scan = first_nl;
  while (scan != std::string::npos) {
    if (text.compare(scan + 1, 3, "---") == 0) {
      std::size_t line_end = text.find('\n', scan + 1);
      std::string line = util::trim(
          text.substr(scan + 1, (line_end == std::string::npos ? text.size()
                                                               : line_end) -
                                    scan - 1));
      if (line == "---") {
        close = scan;
        break;
      }
    }
    scan = text.find('\n', scan + 1);
  }
  if (close == std::string::npos)
    throw ParseError("model card front matter never closes");
  std::string front = text.substr(first_nl + 1, close - first_nl - 1);
  std::size_t body_start = text.find('\n', close + 1);
  std::string body =
      body_start == std::string::npos ? "" : text.substr(body_start + 1);

  YAML::Node y;
  try {
    y = YAML::Load(front);
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("model card front matter: ") + e.what());
  }
  ModelCard card;
  card.markdown = std::move(body);
  try {
    if (!y["model_id"]) throw ParseError("model card lacks model_id");
    card.model_id = y["model_id"].as<std::string>();
    if (util::trim(card.model_id).empty())
      throw ParseError("model card model_id is empty");
    if (y["license"]) card.license = y["license"].as<std::string>();
    if (y["size_bytes"]) card.size_bytes = y["size_bytes"].as<std::int64_t>();
    if (y["tasks"])
      for (const auto& t : y["tasks"])
        card.declared_tasks.push_back(t.as<std::string>());
    if (y["arxiv_ids"])
      for (const auto& a : y["arxiv_ids"])
        card.arxiv_ids.push_back(a.as<std::string>());
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("model card front matter: ") + e.what());
  }
  for (const std::string& id : card.arxiv_ids)
    if (!std::regex_match(id, kArxivPattern))
      throw ParseError("malformed arxiv id: " + id);
  return card;
}

ModelCard load_model_card(const std::string& path) {
  return parse_model_card(util::read_file(path));
}

const std::vector<std::string>& default_snippet_keywords() {
  static const std::vector<std::string> keywords = {
      "usage", "how to use", "example", "inference", "pipeline", "quickstart"};
  return keywords;
}

std::vector<CodeBlock> extract_code_blocks(const ModelCard& card,
                                           const std::vector<std::string>& keywords) {
  if (keywords.empty()) throw Error("extract_code_blocks needs keywords");
  const std::string& md = card.markdown;

  struct Line {
    std::size_t offset;
    std::string text;
  };
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos <= md.size()) {
    std::size_t nl = md.find('\n', pos);
    std::size_t end = nl == std::string::npos ? md.size() : nl;
    lines.push_back({pos, md.substr(pos, end - pos)});
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }

  auto any_keyword = [&](const std::string& s) {
    return std::any_of(keywords.begin(), keywords.end(), [&](const std::string& k) {
      return util::contains_ci(s, k);
    });
  };

  std::vector<CodeBlock> blocks;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string t = util::trim(lines[i].text);
    if (!util::starts_with(t, "```")) continue;
    std::string hint = util::trim(t.substr(3));
    std::size_t closing = i + 1;
    while (closing < lines.size() &&
           !util::starts_with(util::trim(lines[closing].text), "```"))
      ++closing;
    if (closing >= lines.size()) break;  // unterminated fence: ignore the tail
    std::size_t body_begin =
        i + 1 < lines.size() ? lines[i + 1].offset : md.size();
    std::size_t body_end = lines[closing].offset;
    std::string body = md.substr(body_begin, body_end - body_begin);
    if (!body.empty() && body.back() == '\n') body.pop_back();

    bool hit = any_keyword(body);
    for (std::size_t back = 1; !hit && back <= 3 && back <= i; ++back)
      hit = any_keyword(lines[i - back].text);
    if (hit && !body.empty()) blocks.push_back({hint.empty()
                                                    ? std::nullopt
                                                    : std::optional<std::string>(hint),
                                                body, body_begin});
    i = closing;
  }
  return blocks;
}

namespace {

// Fenced code from a provider reply; nullopt when no complete fence exists.
std::optional<std::string> fenced_code(const std::string& reply) {
  auto open = reply.find("```");
  if (open == std::string::npos) return std::nullopt;
  auto line_end = reply.find('\n', open);
  if (line_end == std::string::npos) return std::nullopt;
  auto close = reply.find("```", line_end + 1);
  if (close == std::string::npos) return std::nullopt;
  std::string body = reply.substr(line_end + 1, close - line_end - 1);
  while (!body.empty() && body.back() == '\n') body.pop_back();
  return body;
}

std::string semantic_for(const std::string& param_name) {
  std::string n = util::to_lower(param_name);
  auto has = [&](const char* s) { return n.find(s) != std::string::npos; };
  if (n == "model" || n == "model_id" || has("model_path") || util::ends_with(n, "_model"))
    return "model_path";
  if (has("audio") || has("speech") || has("wav")) return "audio_path";
  if (has("image") || has("img") || has("picture")) return "image_path";
  if (has("question")) return "question";
  if (has("categor") || has("label")) return "categories";
  if (has("table") || has("data")) return "table";
  if (has("text") || has("prompt") || has("context") || has("input") ||
      has("sentence") || has("query"))
    return "text";
  return "other";
}

// Splits a def-signature parameter list on top-level commas.
std::vector<std::string> split_params(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  char quote = 0;
  std::string cur;
  for (char c : s) {
    if (quote) {
      cur.push_back(c);
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
      cur.push_back(c);
      continue;
    }
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
      continue;
    }
    cur.push_back(c);
  }
  if (!util::trim(cur).empty()) out.push_back(cur);
  return out;
}

std::string strip_quotes(const std::string& s) {
  std::string t = util::trim(s);
  if (t.size() >= 2 && (t.front() == '"' || t.front() == '\'') &&
      t.back() == t.front())
    return t.substr(1, t.size() - 2);
  return t;
}

// Spec from a fenced Python function, or the failure reason.
std::optional<exec::ExecutionSpec> spec_from_reply(const std::string& reply,
                                                   const std::string& model_id,
                                                   std::string& why) {
  auto code = fenced_code(reply);
  if (!code) {
    why = "reply holds no fenced code";
    return std::nullopt;
  }
  auto def = code->find("def ");
  if (def == std::string::npos) {
    why = "fenced code holds no function definition";
    return std::nullopt;
  }
  auto open = code->find('(', def);
  if (open == std::string::npos) {
    why = "function definition lacks a parameter list";
    return std::nullopt;
  }
  int depth = 1;
  std::size_t close = open + 1;
  while (close < code->size() && depth > 0) {
    if ((*code)[close] == '(') ++depth;
    if ((*code)[close] == ')') --depth;
    ++close;
  }
  if (depth != 0) {
    why = "unbalanced parameter list";
    return std::nullopt;
  }
  std::string param_list = code->substr(open + 1, close - open - 2);

  exec::ExecutionSpec spec;
  spec.model_id = model_id;
  spec.snippet = *code;
  for (const std::string& raw : split_params(param_list)) {
    auto eq = raw.find('=');
    if (eq == std::string::npos) {
      why = "parameter without default: " + util::trim(raw);
      return std::nullopt;
    }
    std::string name = util::trim(raw.substr(0, eq));
    // drop a type annotation if present
    auto colon = name.find(':');
    if (colon != std::string::npos) name = util::trim(name.substr(0, colon));
    if (name.empty()) {
      why = "empty parameter name";
      return std::nullopt;
    }
    exec::ParamSpec ps;
    ps.name = name;
    ps.semantic_type = semantic_for(name);
    ps.default_value = strip_quotes(raw.substr(eq + 1));
    spec.params.push_back(std::move(ps));
  }
  return spec;
}

}  // namespace

exec::ExecutionSpec synthesize_execution_spec(const std::vector<CodeBlock>& blocks,
                                              const std::string& model_id,
                                              provider::TextCompletion& provider,
                                              const prompts::PromptLibrary& lib) {
  if (blocks.empty()) throw Error("synthesize_execution_spec needs code blocks");
  std::string code;
  for (const CodeBlock& b : blocks) {
    if (!code.empty()) code += "\n\n";
    code += b.text;
  }
  const std::string prompt =
      lib.fill(prompts::PromptLibrary::kSnippetExtraction, {{"code", code}});
  std::string why;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string p = attempt == 0 ? prompt : prompt + "\nReturn only fenced code.";
    std::string reply = provider.complete(p, {});
    if (auto spec = spec_from_reply(reply, model_id, why)) return *spec;
  }
  throw SpecParseError("cannot derive an execution spec: " + why);
}

std::vector<PwcRecord> load_pwc_records(const std::string& path) {
  std::vector<PwcRecord> records;
  std::istringstream in(util::read_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = util::trim(line);
    if (t.empty() || t[0] == '#') continue;
    nlohmann::json j = nlohmann::json::parse(t, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw ParseError("malformed benchmark record", line_no);
    PwcRecord r;
    try {
      r.arxiv_id = j.at("arxiv_id").get<std::string>();
      r.model_variant = j.at("model_variant").get<std::string>();
      r.benchmark = j.at("benchmark").get<std::string>();
      r.metric = j.at("metric").get<std::string>();
      r.value = j.at("value").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("benchmark record: ") + e.what(), line_no);
    }
    if (!std::isfinite(r.value))
      throw ParseError("benchmark value must be finite", line_no);
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

std::string canonical_variant(std::string_view s) {
  std::string out;
  for (char c : s)
    if (std::isalnum(static_cast<unsigned char>(c)))
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

}  // namespace

std::vector<ckg::BenchmarkResult> align_benchmarks(
    const ModelCard& card, const std::vector<PwcRecord>& records) {
  std::set<std::string> ids(card.arxiv_ids.begin(), card.arxiv_ids.end());
  auto slash = card.model_id.find_last_of('/');
  std::string segment = slash == std::string::npos
                            ? card.model_id
                            : card.model_id.substr(slash + 1);
  std::string canon = canonical_variant(segment);
  std::vector<ckg::BenchmarkResult> out;
  for (const PwcRecord& r : records) {
    if (!ids.count(r.arxiv_id)) continue;
    if (canonical_variant(r.model_variant) != canon) continue;
    ckg::BenchmarkResult br;
    br.benchmark = {ckg::NodeKind::Benchmark, r.benchmark};
    br.metric = {ckg::NodeKind::Metric, r.metric};
    br.value = r.value;
    br.direction = ckg::metric_direction(r.metric);
    out.push_back(std::move(br));
  }
  return out;
}

std::size_t Taxonomy::node_count() const {
  std::size_t n = 0;
  auto walk = [&](const TaxonomyNode& node, auto&& self) -> void {
    ++n;
    for (const TaxonomyNode& c : node.children) self(c, self);
  };
  for (const TaxonomyNode& r : roots) walk(r, walk);
  return n;
}

std::size_t Taxonomy::max_depth() const {
  auto walk = [&](const TaxonomyNode& node, auto&& self) -> std::size_t {
    std::size_t deepest = 0;
    for (const TaxonomyNode& c : node.children)
      deepest = std::max(deepest, self(c, self));
    return deepest + 1;
  };
  std::size_t depth = 0;
  for (const TaxonomyNode& r : roots) depth = std::max(depth, walk(r, walk));
  return depth;
}

namespace {

TaxonomyNode taxonomy_node_from_json(const nlohmann::json& j,
                                     std::set<std::string>& path_labels) {
  if (!j.is_object() || !j.contains("label") || !j.at("label").is_string())
    throw ParseError("taxonomy node needs a string label");
  TaxonomyNode node;
  node.label = j.at("label").get<std::string>();
  if (util::trim(node.label).empty())
    throw ParseError("taxonomy label is empty");
  if (!path_labels.insert(node.label).second)
    throw ParseError("duplicate label on a root-to-leaf path: " + node.label);
  for (const auto& c : j.value("children", nlohmann::json::array()))
    node.children.push_back(taxonomy_node_from_json(c, path_labels));
  path_labels.erase(node.label);
  return node;
}

}  // namespace

Taxonomy load_taxonomy(const std::string& path) {
  nlohmann::json j = nlohmann::json::parse(util::read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("roots"))
    throw ParseError("taxonomy file must be a JSON object with \"roots\": " + path);
  Taxonomy t;
  std::set<std::string> path_labels;
  for (const auto& r : j.at("roots"))
    t.roots.push_back(taxonomy_node_from_json(r, path_labels));
  return t;
}

Taxonomy build_taxonomy(const Taxonomy& seed, const std::vector<std::string>& tasks,
                        const embed::TextEmbedder& embedder) {
  if (seed.roots.empty()) throw Error("build_taxonomy needs a non-empty seed");
  Taxonomy t = seed;
  std::map<std::string, std::vector<double>> cache;
  auto vec_of = [&](const std::string& label) -> const std::vector<double>& {
    auto it = cache.find(label);
    if (it == cache.end()) it = cache.emplace(label, embedder.embed(label)).first;
    return it->second;
  };

  for (const std::string& task : tasks) {
    std::vector<TaxonomyNode*> pre_order;
    auto walk = [&](TaxonomyNode& node, auto&& self) -> void {
      pre_order.push_back(&node);
      for (TaxonomyNode& c : node.children) self(c, self);
    };
    for (TaxonomyNode& r : t.roots) walk(r, walk);

    const std::vector<double> task_vec = embedder.embed(task);
    TaxonomyNode* best = nullptr;
    double best_score = -1.0;
    for (TaxonomyNode* node : pre_order) {
      double score = embed::cosine(task_vec, vec_of(node->label));
      if (score > best_score) {
        best_score = score;
        best = node;
      }
    }
    if (best_score >= 0.9) continue;          // already covered
    if (best_score < 0.8 || !best) continue;  // irrelevant
    best->children.push_back({task, {}});
  }
  return t;
}

std::vector<std::string> flatten_taxonomy(const Taxonomy& t, int level) {
  if (level < 1) throw Error("flatten level must be >= 1");
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto walk = [&](const TaxonomyNode& node, int depth, auto&& self) -> void {
    if (depth > level) return;
    if (seen.insert(node.label).second) out.push_back(node.label);
    for (const TaxonomyNode& c : node.children) self(c, depth + 1, self);
  };
  for (const TaxonomyNode& r : t.roots) walk(r, 1, walk);
  return out;
}

std::vector<ckg::Triple> card_to_triples(
    const ModelCard& card, const std::vector<ckg::BenchmarkResult>& results,
    bool has_snippet) {
  using ckg::EdgeKind;
  using ckg::NodeId;
  using ckg::NodeKind;
  NodeId model{NodeKind::Model, card.model_id};
  std::vector<ckg::Triple> triples;
  for (const std::string& task : card.declared_tasks)
    triples.push_back({model, EdgeKind::SupportsTask, NodeId{NodeKind::Task, task}});
  if (card.license)
    triples.push_back(
        {model, EdgeKind::HasLicense, NodeId{NodeKind::License, *card.license}});
  if (card.size_bytes)
    triples.push_back({model, EdgeKind::HasSizeBytes, *card.size_bytes});
  auto slash = card.model_id.find('/');
  if (slash != std::string::npos && slash > 0)
    triples.push_back({model, EdgeKind::AuthoredBy,
                       NodeId{NodeKind::Organization, card.model_id.substr(0, slash)}});
  if (has_snippet)
    triples.push_back(
        {model, EdgeKind::HasSnippet, NodeId{NodeKind::Snippet, card.model_id}});
  for (std::size_t i = 0; i < results.size(); ++i) {
    NodeId rn{NodeKind::Result, card.model_id + "#" + std::to_string(i)};
    triples.push_back({model, EdgeKind::ReportsResult, rn});
    triples.push_back({rn, EdgeKind::ResultOnBenchmark, results[i].benchmark});
    triples.push_back({rn, EdgeKind::ResultMetric, results[i].metric});
    triples.push_back({rn, EdgeKind::ResultValue, results[i].value});
    triples.push_back({rn, EdgeKind::ResultDirection,
                       std::string(results[i].direction == ckg::Direction::LowerBetter
                                       ? "lower_better"
                                       : "higher_better")});
  }
  return triples;
}

ckg::CapabilityGraph build_graph(const std::vector<ModelCard>& cards,
                                 const std::vector<PwcRecord>& pwc) {
  ckg::CapabilityGraph graph;
  for (const ModelCard& card : cards) {
    auto results = align_benchmarks(card, pwc);
    bool has_snippet = !extract_code_blocks(card).empty();
    for (const ckg::Triple& t : card_to_triples(card, results, has_snippet))
      graph.add(t);
  }
  graph.validate();
  return graph;
}

}  // namespace hive::ingest

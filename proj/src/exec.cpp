#include "hive/exec.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cctype>
#include <cstdio>
#include <sstream>

#include <httplib.h>

#include "hive/embed.hpp"
#include "hive/errors.hpp"
#include "hive/pddl.hpp"
#include "hive/util.hpp"

namespace hive::exec {

namespace {

std::string require_arg(const std::map<std::string, std::string>& args,
                        const std::string& name, const std::string& stub) {
  auto it = args.find(name);
  if (it == args.end())
    throw ExecutionError("stub '" + stub + "' needs argument '" + name + "'");
  return it->second;
}

std::string basename_of(const std::string& path) {
  auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

// First 8 hex digits of the content digest; names derived output files.
std::string fnv8(const std::string& s) { return util::fnv1a64_hex(s).substr(0, 8); }

// A sentence ends at '.', '!' or '?' followed by whitespace or end-of-text.
std::vector<std::string> sentences_of(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool terminator = (c == '.' || c == '!' || c == '?') &&
                      (i + 1 == text.size() ||
                       std::isspace(static_cast<unsigned char>(text[i + 1])));
    if (terminator) {
      std::string s = util::trim(text.substr(start, i - start + 1));
      if (!s.empty()) out.push_back(s);
      start = i + 1;
    }
  }
  std::string tail = util::trim(text.substr(start));
  if (!tail.empty()) out.push_back(tail);
  return out;
}

const char* kConstitution =
    "We, the people of the United States, in order to form a more perfect "
    "Union, establish justice, ensure domestic tranquility, provide for the "
    "common defense, promote the general welfare, and secure the blessings of "
    "liberty to ourselves and our posterity, do ordain and establish this "
    "Constitution for the United States of America.";

std::string stub_asr(const std::map<std::string, std::string>& args) {
  std::string base = basename_of(require_arg(args, "audio", "asr_fixture"));
  if (base == "audio_4.wav")
    return "A bright red hibiscus flower blooms in the garden.";
  if (base == "audio_6.wav")
    return "Germany invaded Poland in September 1939. The allied nations "
           "responded with a declaration of war.";
  if (base == "audio_8.wav")
    return "A lone lighthouse keeper tends the lamp through the storm. By "
           "morning the sea is calm and the boats return to the harbor.";
  return kConstitution;
}

// Maximal spans of capitalized tokens; "of"/"the" join a span only when the
// next token is capitalized again. Trailing punctuation breaks a span.
std::string stub_ner(const std::map<std::string, std::string>& args) {
  const std::string text = require_arg(args, "text", "ner_capitalized_spans");
  struct Token {
    std::string word;
    bool breaks_after = false;  // trailing punctuation ends any open span
  };
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) break;
    std::string raw = text.substr(start, i - start);
    std::size_t b = 0, e = raw.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(raw[b]))) ++b;
    bool trailing = false;
    while (e > b && !std::isalnum(static_cast<unsigned char>(raw[e - 1]))) {
      trailing = true;
      --e;
    }
    if (e > b) tokens.push_back({raw.substr(b, e - b), trailing});
  }

  static const std::array<const char*, 9> kStopwords = {
      "We", "The", "In", "A", "An", "I", "It", "This", "That"};
  auto is_cap = [](const std::string& w) {
    return !w.empty() && std::isupper(static_cast<unsigned char>(w[0]));
  };
  auto is_connector = [](const std::string& w) { return w == "of" || w == "the"; };

  std::vector<std::string> spans;
  std::size_t t = 0;
  while (t < tokens.size()) {
    if (!is_cap(tokens[t].word)) {
      ++t;
      continue;
    }
    std::vector<std::string> words{tokens[t].word};
    std::size_t j = t;
    while (!tokens[j].breaks_after && j + 1 < tokens.size()) {
      const Token& next = tokens[j + 1];
      if (is_cap(next.word)) {
        words.push_back(next.word);
        ++j;
      } else if (is_connector(next.word) && !next.breaks_after &&
                 j + 2 < tokens.size() && is_cap(tokens[j + 2].word)) {
        words.push_back(next.word);
        words.push_back(tokens[j + 2].word);
        j += 2;
      } else {
        break;
      }
    }
    bool all_stop = std::all_of(words.begin(), words.end(), [](const std::string& w) {
      return std::find(kStopwords.begin(), kStopwords.end(), w) != kStopwords.end();
    });
    if (!all_stop) {
      std::string span;
      for (const std::string& w : words) {
        if (!span.empty()) span += ' ';
        span += w;
      }
      spans.push_back(span);
    }
    t = j + 1;
  }

  std::vector<std::string> loc, misc;
  for (const std::string& s : spans) {
    bool is_loc = s.find("States") != std::string::npos ||
                  s.find("America") != std::string::npos;
    auto& bucket = is_loc ? loc : misc;
    if (std::find(bucket.begin(), bucket.end(), s) == bucket.end())
      bucket.push_back(s);
  }
  nlohmann::json j = nlohmann::json::object();
  if (!loc.empty()) j["LOC"] = loc;
  if (!misc.empty()) j["MISC"] = misc;
  return j.dump();
}

std::string stub_summarise(const std::map<std::string, std::string>& args) {
  auto sents = sentences_of(require_arg(args, "text", "summarise_head"));
  return "Summary: " + (sents.empty() ? std::string() : sents.front());
}

std::string stub_tti(const std::map<std::string, std::string>& args) {
  return "./out/images/img_" + fnv8(require_arg(args, "prompt", "tti_path")) + ".png";
}

std::string stub_tts(const std::map<std::string, std::string>& args) {
  return "./out/audios/tts_" + fnv8(require_arg(args, "text", "tts_path")) + ".wav";
}

std::string stub_caption(const std::map<std::string, std::string>& args) {
  std::string base = basename_of(require_arg(args, "image", "caption_fixture"));
  if (base == "image_6.jpg") return "a group of people standing in a plaza";
  if (base == "image_11.jpg") return "a sailboat on a calm sea at sunset";
  return "a photo of a scene";
}

std::string stub_detect(const std::map<std::string, std::string>& args) {
  std::string base = basename_of(require_arg(args, "image", "detect_fixture"));
  nlohmann::json j;
  if (base == "image_6.jpg") {
    j["person"] = 4;
    j["dog"] = 1;
  } else {
    j["object"] = 1;
  }
  return j.dump();
}

std::string stub_vqa(const std::map<std::string, std::string>& args) {
  std::string base = basename_of(require_arg(args, "image", "vqa_fixture"));
  require_arg(args, "question", "vqa_fixture");
  if (base == "image_6.jpg") return "four people";
  if (base == "image_11.jpg") return "a sailboat";
  return "unknown";
}

std::string stub_depth(const std::map<std::string, std::string>& args) {
  return "./out/images/depth_" + fnv8(require_arg(args, "image", "depth_path")) +
         ".png";
}

std::string stub_generate(const std::map<std::string, std::string>& args) {
  return "Generated: " + require_arg(args, "text", "generate_echo");
}

// The context sentence closest to the question in trigram space; ties keep
// the earliest sentence.
std::string stub_qa(const std::map<std::string, std::string>& args) {
  const std::string question = require_arg(args, "question", "qa_extract");
  const std::string context = require_arg(args, "context", "qa_extract");
  embed::TrigramEmbedder embedder;
  auto q = embedder.embed(question);
  std::string best;
  double best_score = -1.0;
  for (const std::string& s : sentences_of(context)) {
    double score = embed::cosine(q, embedder.embed(s));
    if (score > best_score) {
      best_score = score;
      best = s;
    }
  }
  return best;
}

std::string stub_tableqa(const std::map<std::string, std::string>& args) {
  const std::string question = require_arg(args, "question", "tableqa_lookup");
  const std::string table = require_arg(args, "table", "tableqa_lookup");
  nlohmann::json j = nlohmann::json::parse(table, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ExecutionError("tableqa_lookup: table argument is not a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!util::contains_ci(question, key)) continue;
    return value.is_string() ? value.get<std::string>() : value.dump();
  }
  return "unknown";
}

// Substring match against the offered categories first; trigram similarity
// as the tie-free fallback (first category wins ties).
std::string stub_classify(const std::map<std::string, std::string>& args) {
  const std::string text = require_arg(args, "text", "classify_trigram");
  const std::string cats_json = require_arg(args, "categories", "classify_trigram");
  nlohmann::json j = nlohmann::json::parse(cats_json, nullptr, false);
  if (j.is_discarded() || !j.is_array() || j.empty())
    throw ExecutionError("classify_trigram: categories argument is not a JSON list");
  std::vector<std::string> cats;
  for (const auto& c : j)
    if (c.is_string()) cats.push_back(c.get<std::string>());
  if (cats.empty())
    throw ExecutionError("classify_trigram: categories list holds no strings");
  for (const std::string& c : cats)
    if (util::contains_ci(text, c)) return c;
  embed::TrigramEmbedder embedder;
  auto t = embedder.embed(text);
  std::string best = cats.front();
  double best_score = -1.0;
  for (const std::string& c : cats) {
    double score = embed::cosine(t, embedder.embed(c));
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

std::string stub_instruct(const std::map<std::string, std::string>& args) {
  const std::string text =
      util::trim(require_arg(args, "text", "instruct_fixture"));
  if (text == "Das Wetter ist heute wunderbar")
    return "The weather is wonderful today";
  return "Generated: " + text;
}

using StubFn = std::string (*)(const std::map<std::string, std::string>&);

const std::map<std::string, StubFn>& stub_table() {
  static const std::map<std::string, StubFn> table = {
      {"asr_fixture", stub_asr},
      {"ner_capitalized_spans", stub_ner},
      {"summarise_head", stub_summarise},
      {"tti_path", stub_tti},
      {"tts_path", stub_tts},
      {"caption_fixture", stub_caption},
      {"detect_fixture", stub_detect},
      {"vqa_fixture", stub_vqa},
      {"depth_path", stub_depth},
      {"generate_echo", stub_generate},
      {"qa_extract", stub_qa},
      {"tableqa_lookup", stub_tableqa},
      {"classify_trigram", stub_classify},
      {"instruct_fixture", stub_instruct},
  };
  return table;
}

}  // namespace

SpecStore SpecStore::load(const std::string& path) {
  nlohmann::json j = nlohmann::json::parse(util::read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw Error("spec store is not a JSON object: " + path);
  SpecStore store;
  for (const auto& [model_id, body] : j.items()) {
    ExecutionSpec spec;
    spec.model_id = model_id;
    spec.output_type = body.value("output_type", std::string("text"));
    spec.snippet = body.value("snippet", std::string());
    spec.backend = body.value("backend", std::string("stub"));
    for (const auto& p : body.value("params", nlohmann::json::array())) {
      ParamSpec ps;
      ps.name = p.at("name").get<std::string>();
      ps.semantic_type = p.at("semantic_type").get<std::string>();
      if (p.contains("default")) ps.default_value = p.at("default").get<std::string>();
      spec.params.push_back(std::move(ps));
    }
    store.put(std::move(spec));
  }
  return store;
}

const ExecutionSpec* SpecStore::find(const std::string& model_id) const {
  auto it = specs_.find(model_id);
  return it == specs_.end() ? nullptr : &it->second;
}

void SpecStore::put(ExecutionSpec spec) { specs_[spec.model_id] = std::move(spec); }

std::optional<ExecutionSpec> fallback_spec(const ckg::NodeId& model,
                                           const ckg::NodeId& task,
                                           const ckg::CapabilityGraph& graph,
                                           const SpecStore& store) {
  for (const ckg::ModelRecord& rec : graph.models_for_task(task)) {
    if (rec.model == model) continue;
    if (!rec.snippet) continue;
    const ExecutionSpec* s = store.find(rec.model.local_name);
    if (!s) continue;
    ExecutionSpec adapted = *s;
    adapted.model_id = model.local_name;
    for (ParamSpec& p : adapted.params)
      if (p.semantic_type == "model_path") p.default_value = model.local_name;
    return adapted;
  }
  return std::nullopt;
}

void Blackboard::seed(const nlu::ParsedQuery& pq) {
  if (pq.url) {
    std::string modality = pddl::modality_for_url(*pq.url);
    std::string semantic = modality == "audio"   ? "audio_path"
                           : modality == "image" ? "image_path"
                                                 : "other";
    put({"url", semantic, *pq.url, -1});
  }
  if (pq.input_text) put({"input_text", "text", *pq.input_text, -1});
  if (pq.question) put({"question", "question", *pq.question, -1});
  if (!pq.data_dict.empty()) {
    nlohmann::json j = pq.data_dict;
    put({"data_dict", "table", j.dump(), -1});
  }
  if (!pq.categories.empty()) {
    nlohmann::json j = pq.categories;
    put({"categories", "categories", j.dump(), -1});
  }
}

void Blackboard::put(ArtifactEntry entry) {
  for (const ArtifactEntry& e : entries_)
    if (e.name == entry.name)
      throw ExecutionError("duplicate blackboard key: " + entry.name);
  entries_.push_back(std::move(entry));
}

const ArtifactEntry* Blackboard::by_name(const std::string& name) const {
  for (const ArtifactEntry& e : entries_)
    if (e.name == name) return &e;
  return nullptr;
}

const ArtifactEntry* Blackboard::latest_of_type(
    const std::string& semantic_type) const {
  const ArtifactEntry* found = nullptr;
  for (const ArtifactEntry& e : entries_)
    if (e.semantic_type == semantic_type && (!found || e.producer > found->producer))
      found = &e;
  return found;
}

std::map<std::string, std::string> map_arguments(const ExecutionSpec& spec,
                                                 const Blackboard& board) {
  std::map<std::string, std::string> args;
  embed::TrigramEmbedder embedder;
  for (const ParamSpec& p : spec.params) {
    if (const ArtifactEntry* e = board.by_name(p.name)) {
      args[p.name] = e->value;
      continue;
    }
    if (const ArtifactEntry* e = board.latest_of_type(p.semantic_type)) {
      args[p.name] = e->value;
      continue;
    }
    auto pvec = embedder.embed(p.name);
    const ArtifactEntry* best = nullptr;
    double best_score = 0.0;
    for (const ArtifactEntry& e : board.entries()) {
      double score = embed::cosine(pvec, embedder.embed(e.name));
      if (score < 0.5) continue;
      bool better = !best || score > best_score ||
                    (score == best_score && e.producer > best->producer);
      if (better) {
        best = &e;
        best_score = score;
      }
    }
    if (best) {
      args[p.name] = best->value;
      continue;
    }
    if (p.default_value) {
      args[p.name] = *p.default_value;
      continue;
    }
    throw UnboundParameter(p.name);
  }
  return args;
}

StubBackend::StubBackend(std::string name) : name_(std::move(name)) {
  if (!stub_table().count(name_)) throw Error("unknown stub backend: " + name_);
}

std::string StubBackend::run(const std::string& model_id,
                             const std::map<std::string, std::string>& args) {
  (void)model_id;
  return stub_table().at(name_)(args);
}

const std::vector<std::string>& StubBackend::stub_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : stub_table()) v.push_back(name);
    return v;
  }();
  return names;
}

SubprocessBackend::SubprocessBackend(std::string command_template)
    : template_(std::move(command_template)) {}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out.push_back(c);
  }
  return out + "'";
}

}  // namespace

std::string SubprocessBackend::run(const std::string& model_id,
                                   const std::map<std::string, std::string>& args) {
  (void)model_id;
  std::string cmd = template_;
  for (const auto& [name, value] : args) {
    std::string slot = "{" + name + "}";
    std::size_t pos;
    while ((pos = cmd.find(slot)) != std::string::npos)
      cmd.replace(pos, slot.size(), shell_quote(value));
  }
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) throw ExecutionError("cannot start subprocess: " + cmd);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = ::pclose(pipe);
  if (status != 0)
    throw ExecutionError("subprocess failed (status " + std::to_string(status) +
                         "): " + cmd);
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

RemoteBackend::RemoteBackend(std::string url) : url_(std::move(url)) {}

std::string RemoteBackend::run(const std::string& model_id,
                               const std::map<std::string, std::string>& args) {
  auto scheme_end = url_.find("://");
  std::string base = url_, path = "/";
  if (scheme_end != std::string::npos) {
    auto slash = url_.find('/', scheme_end + 3);
    if (slash != std::string::npos) {
      base = url_.substr(0, slash);
      path = url_.substr(slash);
    }
  }
  httplib::Client client(base);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(30, 0);
  nlohmann::json body;
  body["model"] = model_id;
  body["args"] = args;
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) throw ExecutionError("remote backend unreachable: " + url_);
  if (res->status != 200)
    throw ExecutionError("remote backend returned HTTP " +
                         std::to_string(res->status));
  nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("text") ||
      !reply.at("text").is_string())
    throw ExecutionError("remote backend reply lacks a \"text\" field");
  return reply.at("text").get<std::string>();
}

BackendRegistry BackendRegistry::load(const std::string& path) {
  nlohmann::json j = nlohmann::json::parse(util::read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw Error("backend registry is not a JSON object: " + path);
  BackendRegistry reg;
  for (const auto& [model_id, cfg] : j.items()) {
    std::string kind = cfg.value("backend", std::string());
    if (kind == "stub")
      reg.put(model_id,
              std::make_shared<StubBackend>(cfg.at("name").get<std::string>()));
    else if (kind == "subprocess")
      reg.put(model_id, std::make_shared<SubprocessBackend>(
                            cfg.at("template").get<std::string>()));
    else if (kind == "remote")
      reg.put(model_id,
              std::make_shared<RemoteBackend>(cfg.at("url").get<std::string>()));
    else
      throw Error("unknown backend kind '" + kind + "' for model " + model_id);
  }
  return reg;
}

void BackendRegistry::put(const std::string& model_id,
                          std::shared_ptr<Backend> backend) {
  backends_[model_id] = std::move(backend);
}

std::string BackendRegistry::run(const std::string& model_id,
                                 const std::map<std::string, std::string>& args) {
  auto it = backends_.find(model_id);
  if (it == backends_.end())
    throw ExecutionError("no backend registered for model '" + model_id + "'");
  return it->second->run(model_id, args);
}

std::int64_t SystemClock::now_ms() {
  auto now = std::chrono::steady_clock::now().time_since_epoch();
  return std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
}

ExecutionTrace execute_plan(const planner::Plan& plan,
                            const selection::SelectionResult& sel,
                            const nlu::ParsedQuery& pq,
                            const ckg::CapabilityGraph& graph,
                            const SpecStore& specs, BackendRegistry& registry,
                            Clock& clock) {
  ExecutionTrace trace;
  trace.parsed = pq;
  trace.plan = plan;
  trace.selection = sel;

  // Resolve every step's model and spec before anything runs.
  struct Bound {
    std::string action;
    std::string model_id;
    ExecutionSpec spec;
    std::vector<std::string> produces;
  };
  std::vector<Bound> bound;
  for (const planner::PlanStep& step : plan.steps) {
    const selection::Assignment* a = sel.find(step.schema_name);
    if (!a || !a->model) {
      trace.final_status = "Err";
      trace.error = "no model assigned for action '" + step.schema_name + "'" +
                    (a && !a->reason.empty() ? " (" + a->reason + ")" : "");
      return trace;
    }
    const ckg::NodeId& model = *a->model;
    ckg::NodeId task{ckg::NodeKind::Task, step.schema_name};
    std::optional<ExecutionSpec> spec;
    if (const ExecutionSpec* s = specs.find(model.local_name))
      spec = *s;
    else
      spec = fallback_spec(model, task, graph, specs);
    if (!spec) {
      trace.final_status = "Err";
      trace.error = "no execution spec for model '" + model.local_name +
                    "' on action '" + step.schema_name + "'";
      return trace;
    }
    bound.push_back({step.schema_name, model.local_name, std::move(*spec),
                     step.produces});
  }

  Blackboard board;
  board.seed(pq);
  int index = 0;
  for (const Bound& b : bound) {
    StepRecord rec;
    rec.action = b.action;
    rec.model_id = b.model_id;
    rec.output_key = "step" + std::to_string(index) + "_" + b.action;
    rec.output_type =
        b.produces.empty() ? b.spec.output_type : b.produces.front();
    try {
      rec.bound_args = map_arguments(b.spec, board);
      std::int64_t t0 = clock.now_ms();
      rec.output = registry.run(b.model_id, rec.bound_args);
      rec.duration_ms = clock.now_ms() - t0;
      board.put({rec.output_key, rec.output_type, rec.output, index});
      trace.steps.push_back(std::move(rec));
    } catch (const Error& e) {
      rec.status = "Err";
      trace.steps.push_back(std::move(rec));
      trace.final_status = "Err";
      trace.error = "step " + std::to_string(index) + " (" + b.action +
                    "): " + e.what();
      return trace;
    }
    ++index;
  }
  if (!trace.steps.empty()) trace.final_output = trace.steps.back().output;
  return trace;
}

std::string render_report(const ExecutionTrace& trace) {
  std::ostringstream out;
  out << "== query ==\n  " << trace.query << "\n";
  out << "== parsed ==\n";
  auto field = [&](const char* name, const std::optional<std::string>& v) {
    out << "  " << name << ": " << (v ? *v : "-") << "\n";
  };
  field("instruction", trace.parsed.instruction);
  field("input_text", trace.parsed.input_text);
  field("question", trace.parsed.question);
  field("url", trace.parsed.url);
  if (!trace.parsed.data_dict.empty()) {
    out << "  data_dict:";
    for (const auto& [k, v] : trace.parsed.data_dict) out << " " << k << "=" << v;
    out << "\n";
  }
  if (!trace.parsed.categories.empty()) {
    out << "  categories:";
    for (const std::string& c : trace.parsed.categories) out << " " << c;
    out << "\n";
  }
  if (trace.parsed.degraded) out << "  (degraded parse)\n";
  out << "== domains ==\n ";
  if (trace.domains.domains.empty()) out << " -";
  for (const std::string& d : trace.domains.domains) out << " " << d;
  out << "\n";
  for (const std::string& w : trace.domains.warnings) out << "  ! " << w << "\n";
  out << "== selected actions ==\n ";
  if (trace.selected_actions.empty()) out << " -";
  for (const std::string& a : trace.selected_actions) out << " " << a;
  out << "\n";
  out << "== plan ==\n";
  if (trace.plan.steps.empty()) out << "  (empty)\n";
  for (std::size_t i = 0; i < trace.plan.steps.size(); ++i)
    out << "  " << i << ". " << trace.plan.steps[i].name() << "\n";
  out << "== model selection ==\n";
  for (const selection::Assignment& a : trace.selection.assignments) {
    out << "  " << a.task << " -> ";
    if (a.model) {
      out << a.model->local_name << "  [rule " << a.rationale.ranking_rule;
      if (a.rationale.winning_value)
        out << ", value " << util::two_decimals(*a.rationale.winning_value);
      out << ", considered " << a.rationale.candidates_considered;
      if (!a.rationale.filters_applied.empty()) {
        out << ", filters";
        for (const std::string& f : a.rationale.filters_applied) out << " " << f;
      }
      out << "]";
    } else {
      out << "UNASSIGNED (" << a.reason << ")";
    }
    out << "\n";
  }
  out << "== steps ==\n";
  if (trace.steps.empty()) out << "  (none)\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const StepRecord& s = trace.steps[i];
    out << "  " << i << ". " << s.action << " via " << s.model_id << " ["
        << s.status << ", " << s.duration_ms << " ms]\n";
    for (const auto& [k, v] : s.bound_args) out << "       " << k << " = " << v << "\n";
    if (s.status == "Ok")
      out << "       -> " << s.output_key << " (" << s.output_type << "): "
          << s.output << "\n";
  }
  out << "== timings ==\n  t_parse_ms=" << trace.t_parse_ms
      << " t_plan_ms=" << trace.t_plan_ms << " t_select_ms=" << trace.t_select_ms
      << "\n";
  out << "== result ==\n  status: " << trace.final_status << "\n";
  if (trace.error) out << "  error: " << *trace.error << "\n";
  if (trace.final_output) out << "  output: " << *trace.final_output << "\n";
  return out.str();
}

nlohmann::json to_json(const ExecutionTrace& trace) {
  nlohmann::json j;
  j["query"] = trace.query;
  j["parsed"] = nlu::to_json(trace.parsed);
  j["domains"] = {{"domains", trace.domains.domains},
                  {"warnings", trace.domains.warnings},
                  {"degraded", trace.domains.degraded}};
  j["selected_actions"] = trace.selected_actions;
  nlohmann::json plan = nlohmann::json::array();
  for (const planner::PlanStep& s : trace.plan.steps)
    plan.push_back({{"action", s.schema_name}, {"args", s.args}});
  j["plan"] = std::move(plan);
  nlohmann::json assignments = nlohmann::json::array();
  for (const selection::Assignment& a : trace.selection.assignments) {
    nlohmann::json row;
    row["task"] = a.task;
    row["model"] = a.model ? nlohmann::json(a.model->local_name) : nullptr;
    row["reason"] = a.reason;
    row["rationale"] = {
        {"candidates_considered", a.rationale.candidates_considered},
        {"filters_applied", a.rationale.filters_applied},
        {"ranking_rule", a.rationale.ranking_rule},
        {"winning_value", a.rationale.winning_value
                              ? nlohmann::json(*a.rationale.winning_value)
                              : nlohmann::json(nullptr)}};
    assignments.push_back(std::move(row));
  }
  j["selection"] = std::move(assignments);
  nlohmann::json steps = nlohmann::json::array();
  for (const StepRecord& s : trace.steps) {
    steps.push_back({{"action", s.action},
                     {"model", s.model_id},
                     {"bound_args", s.bound_args},
                     {"output_key", s.output_key},
                     {"output", s.output},
                     {"output_type", s.output_type},
                     {"duration_ms", s.duration_ms},
                     {"status", s.status}});
  }
  j["steps"] = std::move(steps);
  j["t_parse_ms"] = trace.t_parse_ms;
  j["t_plan_ms"] = trace.t_plan_ms;
  j["t_select_ms"] = trace.t_select_ms;
  j["final_status"] = trace.final_status;
  j["error"] = trace.error ? nlohmann::json(*trace.error) : nlohmann::json(nullptr);
  j["final_output"] =
      trace.final_output ? nlohmann::json(*trace.final_output) : nlohmann::json(nullptr);
  return j;
}

}  // namespace hive::exec

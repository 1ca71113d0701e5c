#include "hive/nlu.hpp"

#include <algorithm>
#include <cctype>

#include "hive/errors.hpp"
#include "hive/util.hpp"

namespace hive::nlu {

bool ParsedQuery::has_any() const {
  return instruction || input_text || question || url || !data_dict.empty() ||
         !categories.empty();
}

nlohmann::json to_json(const ParsedQuery& pq) {
  nlohmann::json j;
  j["instruction"] = pq.instruction ? nlohmann::json(*pq.instruction) : nullptr;
  j["input_text"] = pq.input_text ? nlohmann::json(*pq.input_text) : nullptr;
  j["question"] = pq.question ? nlohmann::json(*pq.question) : nullptr;
  j["url"] = pq.url ? nlohmann::json(*pq.url) : nullptr;
  j["data_dict"] = pq.data_dict;
  j["categories"] = pq.categories;
  j["degraded"] = pq.degraded;
  return j;
}

std::optional<nlohmann::json> parse_lenient_json(const std::string& text) {
  std::string s = util::trim(text);
  // markdown fences
  if (util::starts_with(s, "```")) {
    auto nl = s.find('\n');
    if (nl != std::string::npos) s = s.substr(nl + 1);
    auto fence = s.rfind("```");
    if (fence != std::string::npos) s = s.substr(0, fence);
    s = util::trim(s);
  }
  // trim to the outermost structure
  auto first_obj = s.find('{');
  auto first_arr = s.find('[');
  std::size_t first =
      std::min(first_obj == std::string::npos ? s.size() : first_obj,
               first_arr == std::string::npos ? s.size() : first_arr);
  if (first == s.size()) return std::nullopt;
  char open = s[first];
  char close = open == '{' ? '}' : ']';
  auto last = s.rfind(close);
  if (last == std::string::npos || last < first) return std::nullopt;
  s = s.substr(first, last - first + 1);

  auto try_parse = [](const std::string& candidate) -> std::optional<nlohmann::json> {
    nlohmann::json j = nlohmann::json::parse(candidate, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return j;
  };
  if (auto j = try_parse(s)) return j;

  // python literals -> json
  std::string t;
  t.reserve(s.size());
  bool in_double = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"' && (i == 0 || s[i - 1] != '\\')) in_double = !in_double;
    if (!in_double) {
      if (c == '\'') {
        t.push_back('"');
        continue;
      }
      if (s.compare(i, 4, "None") == 0) {
        t += "null";
        i += 3;
        continue;
      }
      if (s.compare(i, 4, "True") == 0) {
        t += "true";
        i += 3;
        continue;
      }
      if (s.compare(i, 5, "False") == 0) {
        t += "false";
        i += 4;
        continue;
      }
    }
    t.push_back(c);
  }
  return try_parse(t);
}

namespace {

const char* kUrlExtensions[] = {".wav", ".mp3",  ".flac", ".ogg", ".jpg",
                                ".jpeg", ".png", ".gif",  ".bmp", ".csv",
                                ".tsv",  ".json", ".txt", ".pdf", ".mp4"};

std::string strip_token(const std::string& token) {
  std::size_t b = 0, e = token.size();
  auto is_edge = [](char c) {
    return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':' ||
           c == '\'' || c == '"' || c == '(' || c == ')' || c == '[' || c == ']';
  };
  while (b < e && is_edge(token[b]) && token.compare(b, 2, "./") != 0 &&
         token.compare(b, 3, "../") != 0)
    ++b;
  while (e > b && is_edge(token[e - 1])) --e;
  return token.substr(b, e - b);
}

bool looks_like_url(const std::string& token) {
  if (token.find("://") != std::string::npos) return true;
  if (util::starts_with(token, "./") || util::starts_with(token, "../")) return true;
  if (util::starts_with(token, "www.")) return true;
  std::string low = util::to_lower(token);
  for (const char* ext : kUrlExtensions)
    if (util::ends_with(low, ext)) return true;
  return false;
}

// quoted spans 'x' (quote=') or "x" (quote=")
std::vector<std::pair<std::size_t, std::string>> quoted_spans(const std::string& q,
                                                              char quote) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::size_t i = 0;
  while (i < q.size()) {
    if (q[i] != quote) {
      ++i;
      continue;
    }
    auto end = q.find(quote, i + 1);
    if (end == std::string::npos) break;
    // apostrophes inside words ("it's") are not span delimiters
    bool word_left = quote == '\'' && i > 0 &&
                     std::isalnum(static_cast<unsigned char>(q[i - 1]));
    if (!word_left) out.emplace_back(i, q.substr(i + 1, end - i - 1));
    i = end + 1;
  }
  return out;
}

}  // namespace

ParsedQuery fallback_parse(const std::string& query) {
  ParsedQuery pq;

  // url: first token that has a URL shape
  std::size_t url_pos = std::string::npos;
  {
    std::size_t i = 0;
    while (i < query.size()) {
      while (i < query.size() && std::isspace(static_cast<unsigned char>(query[i])))
        ++i;
      std::size_t start = i;
      while (i < query.size() && !std::isspace(static_cast<unsigned char>(query[i])))
        ++i;
      if (i == start) break;
      std::string token = strip_token(query.substr(start, i - start));
      if (!token.empty() && looks_like_url(token)) {
        pq.url = token;
        url_pos = query.find(token, start);
        break;
      }
    }
  }

  // question: sentence holding the first '?';  '.' terminates a sentence only
  // when followed by whitespace so that file paths survive
  auto qmark = query.find('?');
  if (qmark != std::string::npos) {
    std::size_t start = 0;
    for (std::size_t i = 0; i < qmark; ++i) {
      char c = query[i];
      bool hard = c == '!' || c == '?';
      bool dot = c == '.' && i + 1 < query.size() &&
                 std::isspace(static_cast<unsigned char>(query[i + 1]));
      if (hard || dot) start = i + 1;
    }
    std::string sentence = util::trim(query.substr(start, qmark - start + 1));
    if (!sentence.empty()) pq.question = sentence;
  }

  // categories: single-quoted items after an enumeration cue; an " or "
  // sits inside its enumeration, so that cue is anchored back at the start
  // of the comma-separated quoted run preceding it
  {
    std::string low = util::to_lower(query);
    auto spans = quoted_spans(query, '\'');
    std::size_t cue = std::string::npos;
    for (const char* kw : {"such as", "categor"}) {
      auto p = low.find(kw);
      if (p != std::string::npos) cue = std::min(cue, p);
    }
    std::string padded = " " + low + " ";
    auto word_or = padded.find(" or ");
    if (word_or != std::string::npos) {
      std::size_t anchor = word_or;  // query index of the 'o' in " or "
      for (std::size_t k = spans.size(); k-- > 0;) {
        auto& [pos, text] = spans[k];
        std::size_t end = pos + text.size() + 2;  // just past the closing quote
        if (end > anchor) continue;  // span after the or: not part of the run-up
        std::string gap = query.substr(end, anchor - end);
        if (gap.find_first_not_of(", \t") != std::string::npos) break;
        anchor = pos;
      }
      cue = std::min(cue, anchor);
    }
    if (cue != std::string::npos) {
      for (auto& [pos, text] : spans) {
        if (pos < cue || util::trim(text).empty()) continue;
        pq.categories.push_back(util::trim(text));
      }
    }
  }

  // input text: longest double-quoted span
  {
    std::string best;
    for (auto& [pos, text] : quoted_spans(query, '"'))
      if (text.size() > best.size()) best = text;
    if (!best.empty()) pq.input_text = util::trim(best);
  }

  // instruction: the query minus its url
  {
    std::string rest = query;
    if (pq.url && url_pos != std::string::npos)
      rest = query.substr(0, url_pos) + query.substr(url_pos + pq.url->size());
    std::string collapsed = util::collapse_ws(rest);
    if (!collapsed.empty()) pq.instruction = collapsed;
  }

  if (!pq.has_any()) pq.instruction = util::collapse_ws(query);
  return pq;
}

namespace {

std::optional<std::string> json_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) return std::nullopt;
  std::string s = util::trim(v.get<std::string>());
  if (s.empty() || s == "None" || s == "null") return std::nullopt;
  return s;
}

std::optional<ParsedQuery> reply_to_query(const std::string& reply) {
  auto j = parse_lenient_json(reply);
  if (!j || !j->is_object()) return std::nullopt;
  ParsedQuery pq;
  pq.instruction = json_string(*j, "instruction");
  pq.input_text = json_string(*j, "input_text");
  pq.question = json_string(*j, "question");
  pq.url = json_string(*j, "url");
  if (j->contains("data_dict") && j->at("data_dict").is_object()) {
    for (auto& [k, v] : j->at("data_dict").items())
      pq.data_dict[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  if (j->contains("categories")) {
    const auto& cats = j->at("categories");
    if (cats.is_array()) {
      for (const auto& c : cats)
        if (c.is_string()) pq.categories.push_back(c.get<std::string>());
    } else if (cats.is_string() && !cats.get<std::string>().empty()) {
      pq.categories.push_back(cats.get<std::string>());
    }
  }
  if (!pq.has_any()) return std::nullopt;
  return pq;
}

constexpr const char* kJsonReminder =
    "\nDo not generate anything other than a parsable JSON";
constexpr const char* kListReminder =
    "\nDo not give any explanations, only return a list and nothing else.";

}  // namespace

ParsedQuery parse_query(const std::string& query, provider::TextCompletion& provider,
                        const prompts::PromptLibrary& lib, const ParseOptions& opts) {
  const std::string prompt =
      lib.fill(prompts::PromptLibrary::kParsing, {{"USER_INPUT", query}});
  int transport_failures = 0;
  std::string last_error;
  std::optional<ParsedQuery> parsed;
  for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
    std::string p = attempt == 0 ? prompt : prompt + kJsonReminder;
    try {
      parsed = reply_to_query(provider.complete(p, {}));
    } catch (const ProviderError& e) {
      ++transport_failures;
      last_error = e.what();
    }
  }
  if (parsed && parsed->url && query.find(*parsed->url) == std::string::npos)
    parsed.reset();  // hallucinated url: reject the whole parse
  if (!parsed) {
    if (transport_failures == 2 && !opts.allow_fallback)
      throw ProviderError(last_error);
    ParsedQuery pq = fallback_parse(query);
    pq.degraded = true;
    return pq;
  }
  return *parsed;
}

namespace {

struct StemRule {
  const char* stem;
  std::vector<const char*> domains;
};

// fixed-order stem table for the offline fallback
const std::vector<StemRule>& stem_rules() {
  static const std::vector<StemRule> rules = {
      {"transcrib", {"audio"}},
      {"speech", {"audio"}},
      {"voice", {"audio"}},
      {"summar", {"summarisation"}},
      {"entit", {"token_classification"}},
      {"image", {"image_to_text", "image_generation", "image_to_image"}},
      {"picture", {"image_to_text", "image_generation", "image_to_image"}},
      {"translate", {"machine_translation"}},
      {"question", {"question_answering"}},
      {"answer", {"question_answering"}},
      {"classif", {"text_classification"}},
  };
  return rules;
}

std::string render_list(const std::vector<std::string>& items) {
  nlohmann::json j = items;
  // json dump is ["a","b"]; widen to ["a", "b"] for readability
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += nlohmann::json(items[i]).dump();
  }
  return out + "]";
}

}  // namespace

DomainSubset classify_domains(const std::string& instruction,
                              const std::vector<std::string>& registered,
                              provider::TextCompletion& provider,
                              const prompts::PromptLibrary& lib) {
  DomainSubset out;
  std::map<std::string, std::string> canonical;  // lowercase -> registered
  for (const std::string& d : registered) canonical[util::to_lower(d)] = d;

  const std::string prompt =
      lib.fill(prompts::PromptLibrary::kDomainClassification,
               {{"domains", render_list(registered)}, {"query", instruction}});
  std::string reply;
  try {
    reply = provider.complete(prompt, {});
  } catch (const ProviderError&) {
    out.warnings.push_back("provider unavailable; treating reply as empty");
  }

  std::vector<std::string> tokens;
  for (const std::string& line : util::split(reply, '\n'))
    for (const std::string& piece : util::split(line, ';'))
      if (!util::trim(piece).empty()) tokens.push_back(util::trim(piece));
  for (const std::string& tok : tokens) {
    auto it = canonical.find(util::to_lower(tok));
    if (it == canonical.end()) {
      out.warnings.push_back("dropped unregistered domain: " + tok);
      continue;
    }
    if (std::find(out.domains.begin(), out.domains.end(), it->second) ==
        out.domains.end())
      out.domains.push_back(it->second);
  }

  if (out.domains.empty()) {
    out.degraded = true;
    out.warnings.push_back("keyword fallback engaged");
    std::string low = util::to_lower(instruction);
    for (const StemRule& rule : stem_rules()) {
      if (low.find(rule.stem) == std::string::npos) continue;
      for (const char* d : rule.domains) {
        auto it = canonical.find(d);
        if (it == canonical.end()) continue;
        if (std::find(out.domains.begin(), out.domains.end(), it->second) ==
            out.domains.end())
          out.domains.push_back(it->second);
      }
    }
  }
  return out;
}

std::vector<std::string> select_actions(const std::string& instruction,
                                        const std::vector<std::string>& actions,
                                        provider::TextCompletion& provider,
                                        const prompts::PromptLibrary& lib) {
  if (actions.empty()) throw Error("select_actions requires a non-empty action list");
  std::map<std::string, std::string> canonical;
  for (const std::string& a : actions) canonical[util::to_lower(a)] = a;

  const std::string prompt = lib.fill(
      prompts::PromptLibrary::kActionSelection,
      {{"user_instruction", instruction}, {"actions", render_list(actions)}});

  int transport_failures = 0;
  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string p = attempt == 0 ? prompt : prompt + kListReminder;
    std::string reply;
    try {
      reply = provider.complete(p, {});
    } catch (const ProviderError& e) {
      ++transport_failures;
      last_error = e.what();
      continue;
    }
    std::vector<std::string> names;
    if (auto j = parse_lenient_json(reply); j && j->is_array()) {
      for (const auto& item : *j)
        if (item.is_string()) names.push_back(item.get<std::string>());
    } else {
      std::string s = util::trim(reply);
      if (util::starts_with(s, "[")) s = s.substr(1);
      if (util::ends_with(s, "]")) s = s.substr(0, s.size() - 1);
      for (const std::string& piece : util::split(s, ',')) {
        std::string t = util::trim(piece);
        if (t.size() >= 2 && (t.front() == '"' || t.front() == '\'') &&
            t.back() == t.front())
          t = t.substr(1, t.size() - 2);
        if (!t.empty()) names.push_back(t);
      }
    }
    std::vector<std::string> chosen;
    for (const std::string& n : names) {
      auto it = canonical.find(util::to_lower(util::trim(n)));
      if (it == canonical.end()) continue;
      if (std::find(chosen.begin(), chosen.end(), it->second) != chosen.end())
        continue;
      chosen.push_back(it->second);
      if (chosen.size() == 3) break;
    }
    if (!chosen.empty()) return chosen;
  }
  if (transport_failures == 2) throw ProviderError(last_error);
  throw EmptySelection("provider reply shares no action with the offered list");
}

}  // namespace hive::nlu

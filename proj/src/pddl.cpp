#include "hive/pddl.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "hive/errors.hpp"
#include "hive/nlu.hpp"
#include "hive/util.hpp"

namespace hive::pddl {

namespace {

// ---------------------------------------------------------------- lexing

struct Token {
  enum Kind { LParen, RParen, Symbol, End } kind;
  std::string text;
  std::size_t line, col;
};

struct LexOutput {
  std::vector<Token> tokens;
  // produces-tags seen in a ";; produces:" comment, attached to the index of
  // the next token after the comment.
  std::map<std::size_t, std::vector<std::string>> pending_produces;
};

LexOutput lex(std::string_view text) {
  LexOutput out;
  std::size_t line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == ';') {
      std::size_t j = i;
      while (j < text.size() && text[j] != '\n') ++j;
      std::string comment(text.substr(i, j - i));
      // structured annotation: ";; produces: tag,tag"
      std::string body = util::trim(comment.substr(comment.find_first_not_of(';')));
      if (util::starts_with(body, "produces:")) {
        std::vector<std::string> tags;
        for (const std::string& t : util::split(body.substr(9), ','))
          if (!util::trim(t).empty()) tags.push_back(util::trim(t));
        out.pending_produces[out.tokens.size()] = tags;
      }
      while (i < j) advance(text[i++]);
      continue;
    }
    if (c == '(' || c == ')') {
      out.tokens.push_back({c == '(' ? Token::LParen : Token::RParen,
                            std::string(1, c), line, col});
      advance(c);
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(c);
      ++i;
      continue;
    }
    std::size_t start = i, start_col = col, start_line = line;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
           text[i] != '(' && text[i] != ')' && text[i] != ';') {
      advance(text[i]);
      ++i;
    }
    out.tokens.push_back(
        {Token::Symbol, std::string(text.substr(start, i - start)), start_line, start_col});
  }
  out.tokens.push_back({Token::End, "", line, col});
  return out;
}

// ---------------------------------------------------------------- parsing

struct Cursor {
  const LexOutput& lx;
  std::size_t pos = 0;

  const Token& peek() const { return lx.tokens[pos]; }
  const Token& take() { return lx.tokens[pos++]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    throw SyntaxError(t.line, t.col, expected);
  }
  void expect_lparen(const std::string& what) {
    if (peek().kind != Token::LParen) fail("'(' starting " + what);
    take();
  }
  void expect_rparen(const std::string& what) {
    if (peek().kind != Token::RParen) fail("')' closing " + what);
    take();
  }
  std::string expect_symbol(const std::string& what) {
    if (peek().kind != Token::Symbol) fail(what);
    return take().text;
  }
  std::string expect_keyword(const std::string& kw) {
    if (peek().kind != Token::Symbol || util::to_lower(peek().text) != kw)
      fail("'" + kw + "'");
    return take().text;
  }
  std::vector<std::string> produces_at() const {
    auto it = lx.pending_produces.find(pos);
    if (it == lx.pending_produces.end()) return {};
    return it->second;
  }
};

// Typed list "a b - t c - u d" -> [(a,t),(b,t),(c,u),(d,object)].
std::vector<std::pair<std::string, std::string>> parse_typed_list(Cursor& c,
                                                                  bool variables) {
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> run;
  while (c.peek().kind == Token::Symbol) {
    std::string s = c.take().text;
    if (s == "-") {
      if (run.empty()) c.fail("name before '-'");
      std::string type = c.expect_symbol("type name after '-'");
      for (const std::string& n : run) out.emplace_back(n, type);
      run.clear();
      continue;
    }
    if (variables && s[0] != '?') c.fail("variable starting with '?'");
    if (!variables && s[0] == '?') c.fail("type name without '?'");
    run.push_back(s);
  }
  for (const std::string& n : run) out.emplace_back(n, "object");
  return out;
}

Atom parse_atom(Cursor& c) {
  c.expect_lparen("atom");
  Atom a;
  a.pred = c.expect_symbol("predicate name");
  std::string low = util::to_lower(a.pred);
  if (low == "and" || low == "or" || low == "not" || low == "forall" ||
      low == "exists" || low == "when" || low == "imply")
    throw UnsupportedFeature("nested '" + low + "' where an atom was expected");
  if (low == "=" || low == "increase" || low == "decrease" || low == "assign")
    throw UnsupportedFeature("numeric/equality construct '" + low + "'");
  while (c.peek().kind == Token::Symbol) a.args.push_back(c.take().text);
  c.expect_rparen("atom");
  return a;
}

// "(and atom*)" or a bare atom. Positive atoms only.
std::vector<Atom> parse_conjunction(Cursor& c, const std::string& what) {
  c.expect_lparen(what);
  std::vector<Atom> atoms;
  if (c.peek().kind == Token::Symbol && util::to_lower(c.peek().text) == "and") {
    c.take();
    while (c.peek().kind == Token::LParen) atoms.push_back(parse_atom(c));
    c.expect_rparen(what);
    return atoms;
  }
  // bare atom: re-parse from the '(' we already consumed
  --c.pos;
  atoms.push_back(parse_atom(c));
  return atoms;
}

void parse_effect(Cursor& c, ActionSchema& schema) {
  c.expect_lparen("effect");
  auto one = [&]() {
    c.expect_lparen("effect element");
    if (c.peek().kind == Token::Symbol && util::to_lower(c.peek().text) == "not") {
      c.take();
      schema.del_effects.push_back(parse_atom(c));
      c.expect_rparen("negated effect");
      return;
    }
    --c.pos;
    schema.add_effects.push_back(parse_atom(c));
  };
  if (c.peek().kind == Token::Symbol && util::to_lower(c.peek().text) == "and") {
    c.take();
    while (c.peek().kind == Token::LParen) one();
    c.expect_rparen("effect");
    return;
  }
  --c.pos;
  one();
}

ActionSchema parse_action(Cursor& c, const std::vector<std::string>& produces) {
  ActionSchema schema;
  schema.produces = produces;
  schema.name = c.expect_symbol("action name");
  while (c.peek().kind == Token::Symbol) {
    std::string key = util::to_lower(c.take().text);
    if (key == ":parameters") {
      c.expect_lparen("parameter list");
      for (auto& [n, t] : parse_typed_list(c, /*variables=*/true))
        schema.params.push_back({n, t});
      c.expect_rparen("parameter list");
    } else if (key == ":precondition") {
      schema.precondition = parse_conjunction(c, "precondition");
    } else if (key == ":effect") {
      parse_effect(c, schema);
    } else {
      throw UnsupportedFeature("action field '" + key + "'");
    }
  }
  c.expect_rparen("action");
  return schema;
}

void validate_domain(const DomainFile& d) {
  std::map<std::string, const PredicateDecl*> decls;
  for (const PredicateDecl& p : d.predicates) {
    if (!decls.emplace(p.name, &p).second)
      throw PredicateConflict("duplicate predicate declaration: " + p.name);
  }
  std::set<std::string> action_names;
  for (const ActionSchema& a : d.actions) {
    if (!action_names.insert(a.name).second)
      throw PredicateConflict("duplicate action name: " + a.name);
    std::set<std::string> vars;
    for (const TypedVar& v : a.params)
      if (!vars.insert(v.name).second)
        throw PredicateConflict("duplicate parameter " + v.name + " in " + a.name);
    auto check_atoms = [&](const std::vector<Atom>& atoms, const char* where) {
      for (const Atom& at : atoms) {
        auto it = decls.find(at.pred);
        if (it == decls.end())
          throw PredicateConflict("action " + a.name + " uses undeclared predicate " +
                                  at.pred);
        if (it->second->params.size() != at.args.size())
          throw ArityViolation("predicate " + at.pred + " used with arity " +
                               std::to_string(at.args.size()) + " in " + a.name);
        for (const std::string& arg : at.args)
          if (!arg.empty() && arg[0] == '?' && !vars.count(arg))
            throw PredicateConflict("free variable " + arg + " in " + where +
                                    " of " + a.name);
      }
    };
    check_atoms(a.precondition, "precondition");
    check_atoms(a.add_effects, "effect");
    check_atoms(a.del_effects, "effect");
    for (const Atom& at : a.add_effects)
      for (const Atom& dt : a.del_effects)
        if (at == dt)
          throw PredicateConflict("atom both added and deleted in " + a.name);
  }
}

}  // namespace

const ActionSchema* DomainFile::find_action(std::string_view name) const {
  for (const ActionSchema& a : actions)
    if (a.name == name) return &a;
  return nullptr;
}

DomainFile parse_domain(std::string_view text) {
  LexOutput lx = lex(text);
  Cursor c{lx};
  DomainFile d;
  c.expect_lparen("domain definition");
  c.expect_keyword("define");
  c.expect_lparen("domain name");
  c.expect_keyword("domain");
  d.name = c.expect_symbol("domain name");
  c.expect_rparen("domain name");
  while (c.peek().kind == Token::LParen) {
    std::vector<std::string> produces = c.produces_at();
    c.take();  // '('
    std::string section = util::to_lower(c.expect_symbol("section keyword"));
    if (section == ":requirements") {
      while (c.peek().kind == Token::Symbol) {
        std::string req = util::to_lower(c.take().text);
        if (req != ":strips" && req != ":typing")
          throw UnsupportedFeature("requirement " + req);
        d.requirements.insert(req);
      }
      c.expect_rparen("requirements");
    } else if (section == ":types") {
      for (auto& tp : parse_typed_list(c, /*variables=*/false)) d.types.push_back(tp);
      c.expect_rparen("types");
    } else if (section == ":predicates") {
      while (c.peek().kind == Token::LParen) {
        c.take();
        PredicateDecl p;
        p.name = c.expect_symbol("predicate name");
        for (auto& [n, t] : parse_typed_list(c, /*variables=*/true))
          p.params.push_back({n, t});
        c.expect_rparen("predicate declaration");
        d.predicates.push_back(p);
      }
      c.expect_rparen("predicates");
    } else if (section == ":action") {
      d.actions.push_back(parse_action(c, produces));
    } else {
      throw UnsupportedFeature("section '" + section + "'");
    }
  }
  c.expect_rparen("domain definition");
  if (c.peek().kind != Token::End) c.fail("end of input");
  validate_domain(d);
  return d;
}

namespace {

void print_typed_run(std::ostream& out,
                     const std::vector<std::pair<std::string, std::string>>& items) {
  // group consecutive entries sharing a type: "a b - t c - u"
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i;
    while (j < items.size() && items[j].second == items[i].second) ++j;
    for (std::size_t k = i; k < j; ++k) {
      if (k > i || i > 0) out << " ";
      out << items[k].first;
    }
    out << " - " << items[i].second;
    i = j;
  }
}

void print_atom(std::ostream& out, const Atom& a) {
  out << "(" << a.pred;
  for (const std::string& arg : a.args) out << " " << arg;
  out << ")";
}

}  // namespace

std::string print_domain(const DomainFile& d) {
  std::ostringstream out;
  out << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    out << "  (:requirements";
    for (const std::string& r : d.requirements) out << " " << r;  // set: sorted
    out << ")\n";
  }
  if (!d.types.empty()) {
    out << "  (:types ";
    print_typed_run(out, d.types);
    out << ")\n";
  }
  if (!d.predicates.empty()) {
    out << "  (:predicates\n";
    for (std::size_t i = 0; i < d.predicates.size(); ++i) {
      const PredicateDecl& p = d.predicates[i];
      out << "    (" << p.name;
      std::vector<std::pair<std::string, std::string>> params;
      for (const TypedVar& v : p.params) params.emplace_back(v.name, v.type);
      if (!params.empty()) {
        out << " ";
        print_typed_run(out, params);
      }
      out << ")" << (i + 1 == d.predicates.size() ? ")" : "") << "\n";
    }
  }
  for (const ActionSchema& a : d.actions) {
    if (!a.produces.empty()) {
      out << "  ;; produces: ";
      for (std::size_t i = 0; i < a.produces.size(); ++i)
        out << (i ? "," : "") << a.produces[i];
      out << "\n";
    }
    out << "  (:action " << a.name << "\n";
    out << "    :parameters (";
    std::vector<std::pair<std::string, std::string>> params;
    for (const TypedVar& v : a.params) params.emplace_back(v.name, v.type);
    print_typed_run(out, params);
    out << ")\n";
    out << "    :precondition (and";
    for (const Atom& at : a.precondition) {
      out << " ";
      print_atom(out, at);
    }
    out << ")\n";
    out << "    :effect (and";
    for (const Atom& at : a.add_effects) {
      out << " ";
      print_atom(out, at);
    }
    for (const Atom& at : a.del_effects) {
      out << " (not ";
      print_atom(out, at);
      out << ")";
    }
    out << "))\n";
  }
  out << ")\n";
  return out.str();
}

DomainFile merge_domains(const std::vector<DomainFile>& domains) {
  if (domains.empty()) throw Error("merge_domains requires at least one input");
  DomainFile m;
  m.name = "merged";
  std::map<std::string, std::string> type_parent;
  std::map<std::string, PredicateDecl> pred_by_name;
  struct Staged {
    std::string domain;
    ActionSchema schema;
  };
  std::vector<Staged> staged;
  for (const DomainFile& d : domains) {
    for (const std::string& r : d.requirements) m.requirements.insert(r);
    for (const auto& [t, parent] : d.types) {
      auto it = type_parent.find(t);
      if (it == type_parent.end()) {
        type_parent.emplace(t, parent);
        m.types.emplace_back(t, parent);
      } else if (it->second != parent) {
        throw PredicateConflict("type " + t + " declared with parents " + it->second +
                                " and " + parent);
      }
    }
    for (const PredicateDecl& p : d.predicates) {
      auto it = pred_by_name.find(p.name);
      if (it == pred_by_name.end()) {
        pred_by_name.emplace(p.name, p);
        m.predicates.push_back(p);
      } else if (!(it->second == p)) {
        throw PredicateConflict("predicate " + p.name +
                                " declared with conflicting signatures");
      }
    }
    for (const ActionSchema& a : d.actions) {
      bool duplicate = false;
      for (const Staged& s : staged)
        if (s.schema == a) {
          duplicate = true;
          break;
        }
      if (!duplicate) staged.push_back({d.name, a});
    }
  }
  // Same name with different bodies: qualify every colliding schema.
  std::map<std::string, int> name_count;
  for (const Staged& s : staged) name_count[s.schema.name]++;
  for (Staged& s : staged) {
    if (name_count[s.schema.name] > 1)
      s.schema.name = s.domain + "__" + s.schema.name;
    m.actions.push_back(s.schema);
  }
  validate_domain(m);
  return m;
}

void add_done_markers(DomainFile& d) {
  for (ActionSchema& a : d.actions) {
    std::string marker = "done_" + a.name;
    bool declared = false;
    for (const PredicateDecl& p : d.predicates)
      if (p.name == marker) declared = true;
    if (!declared) d.predicates.push_back({marker, {}});
    Atom atom{marker, {}};
    if (std::find(a.add_effects.begin(), a.add_effects.end(), atom) ==
        a.add_effects.end())
      a.add_effects.push_back(atom);
  }
}

std::string GroundAtom::to_string() const {
  std::string s = "(" + pred;
  for (const std::string& a : args) s += " " + a;
  return s + ")";
}

std::string print_problem(const ProblemFile& p) {
  std::ostringstream out;
  out << "(define (problem " << p.name << ")\n";
  out << "  (:domain " << p.domain_name << ")\n";
  if (!p.objects.empty()) {
    out << "  (:objects ";
    std::vector<std::pair<std::string, std::string>> objs;
    for (const TypedConst& o : p.objects) objs.emplace_back(o.name, o.type);
    print_typed_run(out, objs);
    out << ")\n";
  }
  out << "  (:init";
  for (const GroundAtom& a : p.init) out << " " << a.to_string();
  out << ")\n";
  out << "  (:goal (and";
  for (const GroundAtom& a : p.goal) out << " " << a.to_string();
  out << ")))\n";
  return out.str();
}

std::string modality_for_url(std::string_view url) {
  auto dot = url.rfind('.');
  std::string ext = dot == std::string_view::npos
                        ? ""
                        : util::to_lower(url.substr(dot + 1));
  if (ext == "wav" || ext == "mp3") return "audio";
  if (ext == "jpg" || ext == "png") return "image";
  return "document";
}

ProblemFile synthesize_problem(const nlu::ParsedQuery& pq,
                               const std::vector<std::string>& selected,
                               const DomainFile& merged) {
  ProblemFile p;
  p.name = "query";
  p.domain_name = merged.name;

  for (const std::string& name : selected) {
    const ActionSchema* a = merged.find_action(name);
    if (!a) throw UnknownAction(name);
    std::string marker = "done_" + name;
    bool declared = false;
    for (const PredicateDecl& pd : merged.predicates)
      if (pd.name == marker) declared = true;
    if (!declared)
      throw Error("domain lacks marker predicate " + marker +
                  "; merge pipeline must add done markers first");
  }

  // Input artifacts in fixed order: url, input_text, data_dict.
  std::vector<std::pair<std::string, std::string>> artifacts;  // (name, modality)
  int next = 0;
  if (pq.url)
    artifacts.emplace_back("a" + std::to_string(next++), modality_for_url(*pq.url));
  if (pq.input_text) artifacts.emplace_back("a" + std::to_string(next++), "text");
  if (!pq.data_dict.empty())
    artifacts.emplace_back("a" + std::to_string(next++), "table");

  // Required/produced modalities per action, read off the availability atoms.
  auto modalities_in = [](const std::vector<Atom>& atoms) {
    std::set<std::string> out;
    for (const Atom& a : atoms)
      if (a.pred == "available" && !a.args.empty() && a.args[0][0] != '?')
        out.insert(a.args[0]);
    return out;
  };

  // Fail-fast reachability over the selected actions only: starting from the
  // query's artifact modalities, an action fires once its required modalities
  // are coverable, contributing what it produces.
  std::set<std::string> closure;
  for (const auto& [name, mod] : artifacts) closure.insert(mod);
  bool grew = true;
  std::set<std::string> satisfied;
  while (grew) {
    grew = false;
    for (const std::string& name : selected) {
      if (satisfied.count(name)) continue;
      const ActionSchema* a = merged.find_action(name);
      std::set<std::string> need = modalities_in(a->precondition);
      bool ok = std::all_of(need.begin(), need.end(),
                            [&](const std::string& m) { return closure.count(m) > 0; });
      if (!ok) continue;
      satisfied.insert(name);
      for (const std::string& m : modalities_in(a->add_effects)) closure.insert(m);
      grew = true;
    }
  }
  for (const std::string& name : selected) {
    if (satisfied.count(name)) continue;
    const ActionSchema* a = merged.find_action(name);
    for (const std::string& m : modalities_in(a->precondition))
      if (!closure.count(m))
        throw NoInputArtifact("action " + name + " requires modality '" + m +
                              "' not derivable from the query inputs");
  }

  bool has_modality_type = false, has_artifact_type = false;
  for (const auto& [t, parent] : merged.types) {
    if (t == "modality") has_modality_type = true;
    if (t == "artifact") has_artifact_type = true;
  }

  if (has_modality_type) {
    // declare every modality constant the domain or the inputs mention
    std::set<std::string> mods;
    for (const ActionSchema& a : merged.actions) {
      for (const std::string& m : modalities_in(a.precondition)) mods.insert(m);
      for (const std::string& m : modalities_in(a.add_effects)) mods.insert(m);
      for (const std::string& m : modalities_in(a.del_effects)) mods.insert(m);
    }
    for (const auto& [name, mod] : artifacts) mods.insert(mod);
    for (const std::string& m : mods) p.objects.push_back({m, "modality"});
  }
  if (has_artifact_type)
    for (const auto& [name, mod] : artifacts) p.objects.push_back({name, "artifact"});

  bool has_available = false;
  for (const PredicateDecl& pd : merged.predicates)
    if (pd.name == "available" && pd.params.size() == 2) has_available = true;
  if (has_available)
    for (const auto& [name, mod] : artifacts)
      p.init.push_back({"available", {mod, name}});

  for (const std::string& name : selected) p.goal.push_back({"done_" + name, {}});
  return p;
}

std::string GroundAction::name() const {
  std::string s = schema_name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + args[i];
  return s + ")";
}

std::size_t GroundedTask::atom_index(const GroundAtom& a) const {
  auto it = std::lower_bound(atoms.begin(), atoms.end(), a);
  if (it == atoms.end() || !(*it == a))
    throw Error("atom not in universe: " + a.to_string());
  return static_cast<std::size_t>(it - atoms.begin());
}

GroundedTask ground(const DomainFile& d, const ProblemFile& p,
                    std::size_t max_actions) {
  std::map<std::string, std::string> type_parent;
  for (const auto& [t, parent] : d.types) type_parent.emplace(t, parent);
  auto matches = [&](const std::string& obj_type, const std::string& param_type) {
    if (param_type == "object") return true;
    std::string t = obj_type;
    std::set<std::string> seen;
    while (true) {
      if (t == param_type) return true;
      if (t == "object" || !seen.insert(t).second) return false;
      auto it = type_parent.find(t);
      t = it == type_parent.end() ? "object" : it->second;
    }
  };

  std::set<std::string> object_names;
  for (const TypedConst& o : p.objects) object_names.insert(o.name);

  // candidate objects per schema parameter, in declaration order
  std::size_t total = 0;
  std::vector<std::vector<std::vector<std::string>>> candidates(d.actions.size());
  for (std::size_t ai = 0; ai < d.actions.size(); ++ai) {
    const ActionSchema& a = d.actions[ai];
    std::size_t count = 1;
    candidates[ai].resize(a.params.size());
    for (std::size_t pi = 0; pi < a.params.size(); ++pi) {
      for (const TypedConst& o : p.objects)
        if (matches(o.type, a.params[pi].type)) candidates[ai][pi].push_back(o.name);
      count *= candidates[ai][pi].size();
    }
    total += count;
    if (total > max_actions) throw GroundingExplosion(total, max_actions);
  }

  auto instantiate = [&](const Atom& atom,
                         const std::map<std::string, std::string>& binding) {
    GroundAtom g;
    g.pred = atom.pred;
    for (const std::string& arg : atom.args) {
      if (!arg.empty() && arg[0] == '?') {
        g.args.push_back(binding.at(arg));
      } else {
        if (!object_names.count(arg))
          throw Error("unknown constant '" + arg + "' in action " + atom.pred);
        g.args.push_back(arg);
      }
    }
    return g;
  };

  struct RawAction {
    std::string schema;
    std::vector<std::string> args;
    std::vector<GroundAtom> pre, add, del;
    std::vector<std::string> produces;
  };
  std::vector<RawAction> raw;
  std::set<GroundAtom> universe;
  for (const GroundAtom& a : p.init) universe.insert(a);
  for (const GroundAtom& a : p.goal) universe.insert(a);

  for (std::size_t ai = 0; ai < d.actions.size(); ++ai) {
    const ActionSchema& a = d.actions[ai];
    std::vector<std::size_t> idx(a.params.size(), 0);
    bool viable = true;
    for (const auto& c : candidates[ai])
      if (c.empty()) viable = false;
    if (!viable && !a.params.empty()) continue;
    while (true) {
      std::map<std::string, std::string> binding;
      for (std::size_t pi = 0; pi < a.params.size(); ++pi)
        binding[a.params[pi].name] = candidates[ai][pi][idx[pi]];
      RawAction r;
      r.schema = a.name;
      r.produces = a.produces;
      for (std::size_t pi = 0; pi < a.params.size(); ++pi)
        r.args.push_back(binding[a.params[pi].name]);
      for (const Atom& at : a.precondition) r.pre.push_back(instantiate(at, binding));
      for (const Atom& at : a.add_effects) r.add.push_back(instantiate(at, binding));
      for (const Atom& at : a.del_effects) r.del.push_back(instantiate(at, binding));
      for (const GroundAtom& g : r.pre) universe.insert(g);
      for (const GroundAtom& g : r.add) universe.insert(g);
      for (const GroundAtom& g : r.del) universe.insert(g);
      raw.push_back(std::move(r));
      // advance mixed-radix counter
      std::size_t pi = 0;
      for (; pi < idx.size(); ++pi) {
        if (++idx[pi] < candidates[ai][pi].size()) break;
        idx[pi] = 0;
      }
      if (pi == idx.size()) break;
      if (a.params.empty()) break;
    }
  }

  GroundedTask task;
  task.atoms.assign(universe.begin(), universe.end());  // std::set: sorted
  const std::size_t n = task.atoms.size();
  auto to_bits = [&](const std::vector<GroundAtom>& atoms) {
    Bits b(n);
    for (const GroundAtom& a : atoms) b.set(task.atom_index(a));
    return b;
  };
  task.init = to_bits(p.init);
  task.goal = to_bits(p.goal);
  for (const RawAction& r : raw) {
    GroundAction g;
    g.schema_name = r.schema;
    g.args = r.args;
    g.produces = r.produces;
    g.pre = to_bits(r.pre);
    g.add = to_bits(r.add);
    g.del = to_bits(r.del);
    g.del &= ~g.add;  // add wins when a schema instantiation aliases
    task.actions.push_back(std::move(g));
  }
  return task;
}

}  // namespace hive::pddl

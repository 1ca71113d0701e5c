#include <doctest.h>

#include <filesystem>

#include "hive/errors.hpp"
#include "hive/nlu.hpp"
#include "hive/pddl.hpp"
#include "hive/util.hpp"
#include "testgen.hpp"

using namespace hive;
using pddl::DomainFile;

namespace {

const char* kChainDomain = R"((define (domain chain)
  (:requirements :strips :typing)
  (:types modality artifact - object)
  (:predicates
    (available ?m - modality ?a - artifact))
  ;; produces: text
  (:action asr
    :parameters (?a - artifact)
    :precondition (and (available audio ?a))
    :effect (and (available text ?a)))
  ;; produces: text
  (:action ner
    :parameters (?a - artifact)
    :precondition (and (available text ?a))
    :effect (and (available text ?a)))))";

nlu::ParsedQuery query_with_url(const std::string& url) {
  nlu::ParsedQuery pq;
  pq.instruction = "do something";
  pq.url = url;
  return pq;
}

}  // namespace

TEST_CASE("parse_domain reads the supported subset") {
  DomainFile d = pddl::parse_domain(kChainDomain);
  CHECK(d.name == "chain");
  CHECK(d.requirements == std::set<std::string>{":strips", ":typing"});
  REQUIRE(d.types.size() == 2);
  CHECK(d.types[0] == std::pair<std::string, std::string>{"modality", "object"});
  REQUIRE(d.predicates.size() == 1);
  CHECK(d.predicates[0].name == "available");
  REQUIRE(d.predicates[0].params.size() == 2);
  CHECK(d.predicates[0].params[0].name == "?m");
  CHECK(d.predicates[0].params[0].type == "modality");

  REQUIRE(d.actions.size() == 2);
  const pddl::ActionSchema& asr = d.actions[0];
  CHECK(asr.name == "asr");
  CHECK(asr.params == std::vector<pddl::TypedVar>{{"?a", "artifact"}});
  CHECK(asr.precondition == std::vector<pddl::Atom>{{"available", {"audio", "?a"}}});
  CHECK(asr.add_effects == std::vector<pddl::Atom>{{"available", {"text", "?a"}}});
  CHECK(asr.del_effects.empty());
  CHECK(asr.produces == std::vector<std::string>{"text"});
  CHECK(d.find_action("ner") != nullptr);
  CHECK(d.find_action("missing") == nullptr);
}

TEST_CASE("produces comment binds only when adjacent to its action") {
  const char* text = R"((define (domain p)
  (:requirements :strips)
  (:predicates (ready))
  ;; produces: image_path
  (:action first
    :parameters ()
    :precondition (and)
    :effect (and (ready)))
  (:action second
    :parameters ()
    :precondition (and)
    :effect (and (ready)))))";
  DomainFile d = pddl::parse_domain(text);
  CHECK(d.actions[0].produces == std::vector<std::string>{"image_path"});
  CHECK(d.actions[1].produces.empty());
}

TEST_CASE("parser rejects out-of-subset input") {
  CHECK_THROWS_AS(pddl::parse_domain("(define (domain x)\n  (:requirements :adl))"),
                  UnsupportedFeature);
  CHECK_THROWS_AS(pddl::parse_domain(
                      "(define (domain x)\n  (:requirements :strips)\n"
                      "  (:predicates (p))\n"
                      "  (:action a :parameters ()\n"
                      "    :precondition (not (p))\n    :effect (and (p))))"),
                  UnsupportedFeature);
  try {
    pddl::parse_domain("(define (domain x)\n  (:requirements");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line >= 2);
  }
  CHECK_THROWS_AS(pddl::parse_domain("hello"), SyntaxError);
}

TEST_CASE("parse-print identity on the shipped domains") {
  namespace fs = std::filesystem;
  int seen = 0;
  for (const auto& entry :
       fs::directory_iterator(std::string(HIVE_SOURCE_ROOT) + "/fixtures/pddl")) {
    if (entry.path().extension() != ".pddl") continue;
    ++seen;
    DomainFile d = pddl::parse_domain(util::read_file(entry.path().string()));
    DomainFile again = pddl::parse_domain(pddl::print_domain(d));
    CHECK(again == d);
  }
  CHECK(seen == 10);
}

TEST_CASE("parse-print identity on generated domains") {
  util::Rng rng(7);
  for (int i = 0; i < 80; ++i) {
    DomainFile d = testgen::random_domain(rng, i);
    CAPTURE(i);
    DomainFile back = pddl::parse_domain(pddl::print_domain(d));
    CHECK(back == d);
  }
}

TEST_CASE("merge_domains unions and renames") {
  DomainFile a = pddl::parse_domain(kChainDomain);
  DomainFile b = pddl::parse_domain(kChainDomain);
  b.name = "chain2";

  SUBCASE("exact duplicates collapse") {
    DomainFile m = pddl::merge_domains({a, b});
    CHECK(m.actions.size() == 2);
    CHECK(m.predicates.size() == 1);
    CHECK(m.types.size() == 2);
  }

  SUBCASE("same name, different body renames both") {
    b.actions[0].add_effects[0].args[0] = "audio";  // asr now emits audio
    DomainFile m = pddl::merge_domains({a, b});
    REQUIRE(m.actions.size() == 3);
    CHECK(m.find_action("chain__asr") != nullptr);
    CHECK(m.find_action("chain2__asr") != nullptr);
    CHECK(m.find_action("ner") != nullptr);
    CHECK(m.find_action("asr") == nullptr);
  }

  SUBCASE("conflicting predicate declarations are fatal") {
    b.predicates[0].params.pop_back();
    CHECK_THROWS_AS(pddl::merge_domains({a, b}), PredicateConflict);
  }
}

TEST_CASE("add_done_markers is complete and idempotent") {
  DomainFile d = pddl::parse_domain(kChainDomain);
  pddl::add_done_markers(d);

  auto has_pred = [&](const std::string& name) {
    for (const auto& p : d.predicates)
      if (p.name == name) return true;
    return false;
  };
  CHECK(has_pred("done_asr"));
  CHECK(has_pred("done_ner"));
  for (const auto& a : d.actions) {
    pddl::Atom marker{"done_" + a.name, {}};
    CHECK(std::count(a.add_effects.begin(), a.add_effects.end(), marker) == 1);
  }
  CHECK(d.actions[0].name == "asr");  // names untouched

  DomainFile once = d;
  pddl::add_done_markers(d);
  CHECK(d == once);
}

TEST_CASE("modality_for_url buckets") {
  CHECK(pddl::modality_for_url("http://x/y/clip.wav") == "audio");
  CHECK(pddl::modality_for_url("a.MP3") == "audio");
  CHECK(pddl::modality_for_url("photo.jpg") == "image");
  CHECK(pddl::modality_for_url("photo.PNG") == "image");
  CHECK(pddl::modality_for_url("notes.txt") == "document");
  CHECK(pddl::modality_for_url("no_extension") == "document");
}

TEST_CASE("synthesize_problem builds artifacts and goals") {
  DomainFile d = pddl::parse_domain(kChainDomain);
  pddl::add_done_markers(d);

  nlu::ParsedQuery pq = query_with_url("http://host/audio_1.wav");
  pq.input_text = "Some pasted text.";

  pddl::ProblemFile p = pddl::synthesize_problem(pq, {"asr", "ner"}, d);
  CHECK(p.domain_name == "chain");
  // Modality constants first (sorted), then the artifacts in fixed order
  // (url first, then input_text).
  REQUIRE(p.objects.size() == 4);
  CHECK(p.objects[0] == pddl::TypedConst{"audio", "modality"});
  CHECK(p.objects[1] == pddl::TypedConst{"text", "modality"});
  CHECK(p.objects[2] == pddl::TypedConst{"a0", "artifact"});
  CHECK(p.objects[3] == pddl::TypedConst{"a1", "artifact"});

  CHECK(std::count(p.init.begin(), p.init.end(),
                   pddl::GroundAtom{"available", {"audio", "a0"}}) == 1);
  CHECK(std::count(p.init.begin(), p.init.end(),
                   pddl::GroundAtom{"available", {"text", "a1"}}) == 1);
  REQUIRE(p.goal.size() == 2);
  CHECK(p.goal[0] == pddl::GroundAtom{"done_asr", {}});
  CHECK(p.goal[1] == pddl::GroundAtom{"done_ner", {}});

  CHECK_THROWS_AS(pddl::synthesize_problem(pq, {"unknown_action"}, d), UnknownAction);

  // A query with no artifact cannot satisfy modality-hungry selected actions.
  nlu::ParsedQuery bare;
  bare.instruction = "just do it";
  CHECK_THROWS_AS(pddl::synthesize_problem(bare, {"asr"}, d), NoInputArtifact);

  // The closure is over SELECTED actions only: text via ner's self-loop does
  // not license asr when only audio-less inputs exist.
  nlu::ParsedQuery text_only;
  text_only.instruction = "x";
  text_only.input_text = "hello";
  CHECK_THROWS_AS(pddl::synthesize_problem(text_only, {"asr"}, d), NoInputArtifact);
  CHECK_NOTHROW(pddl::synthesize_problem(text_only, {"ner"}, d));
}

TEST_CASE("print_problem renders a loadable snapshot") {
  DomainFile d = pddl::parse_domain(kChainDomain);
  pddl::add_done_markers(d);
  nlu::ParsedQuery pq = query_with_url("clip.wav");
  pddl::ProblemFile p = pddl::synthesize_problem(pq, {"asr"}, d);
  std::string text = pddl::print_problem(p);
  CHECK(text.find("(define (problem query)") != std::string::npos);
  CHECK(text.find("(:domain chain)") != std::string::npos);
  CHECK(text.find("(available audio a0)") != std::string::npos);
  CHECK(text.find("(done_asr)") != std::string::npos);
}

TEST_CASE("ground enumerates deterministically and caps explosions") {
  DomainFile d = pddl::parse_domain(kChainDomain);
  pddl::add_done_markers(d);
  nlu::ParsedQuery pq = query_with_url("clip.wav");
  pddl::ProblemFile p = pddl::synthesize_problem(pq, {"asr", "ner"}, d);

  pddl::GroundedTask t1 = pddl::ground(d, p);
  pddl::GroundedTask t2 = pddl::ground(d, p);
  REQUIRE(t1.actions.size() == t2.actions.size());
  for (std::size_t i = 0; i < t1.actions.size(); ++i)
    CHECK(t1.actions[i].name() == t2.actions[i].name());

  CHECK(std::is_sorted(t1.atoms.begin(), t1.atoms.end()));
  // One artifact -> one binding per schema.
  CHECK(t1.actions.size() == 2);
  CHECK(t1.actions[0].schema_name == "asr");
  CHECK(t1.actions[0].args == std::vector<std::string>{"a0"});
  CHECK(t1.actions[0].produces == std::vector<std::string>{"text"});

  CHECK(t1.init.count() == 1);
  CHECK(t1.goal.count() == 2);
  CHECK_THROWS_AS(t1.atom_index({"missing", {}}), Error);

  CHECK_THROWS_AS(pddl::ground(d, p, 1), GroundingExplosion);
}

TEST_CASE("grounded semantics match the schema") {
  DomainFile d = pddl::parse_domain(kChainDomain);
  pddl::add_done_markers(d);
  nlu::ParsedQuery pq = query_with_url("clip.wav");
  pddl::ProblemFile p = pddl::synthesize_problem(pq, {"asr", "ner"}, d);
  pddl::GroundedTask t = pddl::ground(d, p);

  std::size_t avail_audio = t.atom_index({"available", {"audio", "a0"}});
  std::size_t avail_text = t.atom_index({"available", {"text", "a0"}});
  std::size_t done_asr = t.atom_index({"done_asr", {}});

  const pddl::GroundAction& asr = t.actions[0];
  CHECK(asr.pre.test(avail_audio));
  CHECK(asr.add.test(avail_text));
  CHECK(asr.add.test(done_asr));
  CHECK(asr.del.none());
  CHECK(t.init.test(avail_audio));
}

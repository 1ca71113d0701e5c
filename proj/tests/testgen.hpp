#pragma once

// Deterministic generators shared by the unit suites and the acceptance
// binary. Everything is driven by util::Rng so a seed pins the corpus.

#include <set>
#include <string>
#include <vector>

#include "hive/pddl.hpp"
#include "hive/util.hpp"

namespace hive::testgen {

// A random domain in the supported subset: strips+typing, availability-style
// predicates over modality constants, optional produces tags, occasional
// delete effects and artifact-free actions.
inline pddl::DomainFile random_domain(util::Rng& rng, int index) {
  static const std::vector<std::string> kModalities = {
      "text", "audio", "image", "table", "depth", "video"};
  static const std::vector<std::string> kTags = {
      "text", "audio_path", "image_path", "table", "categories"};

  pddl::DomainFile d;
  d.name = "gen_domain_" + std::to_string(index);
  d.requirements = {":strips", ":typing"};
  d.types = {{"modality", "object"}, {"artifact", "object"}};
  if (rng.chance(0.3)) d.types.emplace_back("gadget", "object");

  d.predicates.push_back(
      {"available", {{"?m", "modality"}, {"?a", "artifact"}}});
  int extra_preds = rng.range(0, 2);
  for (int p = 0; p < extra_preds; ++p)
    d.predicates.push_back({"flag_" + std::to_string(p), {}});

  int n_actions = rng.range(1, 5);
  for (int i = 0; i < n_actions; ++i) {
    pddl::ActionSchema a;
    a.name = "act_" + std::to_string(i);
    if (rng.chance(0.15)) {
      // Artifact-free action: no parameters, empty conjunction precondition.
      a.add_effects.push_back({"flag_0", {}});
      if (d.predicates.size() < 2) d.predicates.push_back({"flag_0", {}});
    } else {
      a.params.push_back({"?a", "artifact"});
      const std::string& in = kModalities[rng.below(kModalities.size())];
      const std::string& out = kModalities[rng.below(kModalities.size())];
      a.precondition.push_back({"available", {in, "?a"}});
      if (rng.chance(0.3)) {
        a.params.push_back({"?b", "artifact"});
        a.precondition.push_back(
            {"available", {kModalities[rng.below(kModalities.size())], "?b"}});
      }
      a.add_effects.push_back({"available", {out, "?a"}});
      // Consuming the input is only expressible when it differs from the
      // output; adding and deleting the same atom is rejected by the parser.
      bool wants_del = rng.chance(0.2);
      if (wants_del && out != in)
        a.del_effects.push_back({"available", {in, "?a"}});
    }
    int n_tags = rng.range(0, 2);
    for (int t = 0; t < n_tags; ++t)
      a.produces.push_back(kTags[rng.below(kTags.size())]);
    d.actions.push_back(std::move(a));
  }
  return d;
}

// A random grounded task in the pipeline's shape: monotone availability
// atoms, one unique done-marker per action, marker-only goals. Bounds match
// the oracle-equivalence budget: <= 12 atoms, <= 10 ground actions.
inline pddl::GroundedTask random_task(util::Rng& rng) {
  int n_avail = rng.range(3, 5);
  int n_act = rng.range(3, 7);

  pddl::GroundedTask task;
  for (int i = 0; i < n_avail; ++i)
    task.atoms.push_back({"available", {"m" + std::to_string(i), "a0"}});
  for (int i = 0; i < n_act; ++i)
    task.atoms.push_back({"done_act" + std::to_string(i), {}});
  std::sort(task.atoms.begin(), task.atoms.end());

  const std::size_t n = task.atoms.size();
  auto avail_bit = [&](int i) {
    return task.atom_index({"available", {"m" + std::to_string(i), "a0"}});
  };
  auto marker_bit = [&](int i) {
    return task.atom_index({"done_act" + std::to_string(i), {}});
  };

  task.init.resize(n);
  task.goal.resize(n);
  for (int i = 0; i < n_avail; ++i)
    if (rng.chance(0.35)) task.init.set(avail_bit(i));

  for (int i = 0; i < n_act; ++i) {
    pddl::GroundAction a;
    a.schema_name = "act" + std::to_string(i);
    a.args = {"a0"};
    a.pre.resize(n);
    a.add.resize(n);
    a.del.resize(n);
    int n_pre = rng.range(0, 2);
    std::set<int> pres;
    while (static_cast<int>(pres.size()) < n_pre)
      pres.insert(rng.range(0, n_avail - 1));
    for (int p : pres) a.pre.set(avail_bit(p));
    a.add.set(marker_bit(i));
    if (rng.chance(0.75)) a.add.set(avail_bit(rng.range(0, n_avail - 1)));
    task.actions.push_back(std::move(a));
  }

  int n_goal = rng.range(1, 3);
  std::set<int> goals;
  while (static_cast<int>(goals.size()) < n_goal)
    goals.insert(rng.range(0, n_act - 1));
  for (int g : goals) task.goal.set(marker_bit(g));
  return task;
}

}  // namespace hive::testgen

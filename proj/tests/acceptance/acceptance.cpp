// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "cases.hpp"
#include "oracles.hpp"
#include "relcompose/engine.hpp"
#include "relcompose/formats.hpp"
#include "relcompose/generator.hpp"
#include "relcompose/random.hpp"
#include "relcompose/validator.hpp"

using namespace relcompose;

namespace {

// Budgets and sample sizes.
constexpr double kMotivatingSeconds = 0.1;
constexpr double kTable1Seconds = 2.0;
constexpr double kTable2Seconds = 5.0;
constexpr std::uint64_t kTable1Seeds[] = {1, 2, 3, 4};
constexpr int kMatcherCases = 500;
constexpr int kTinyInstances = 200;
constexpr std::size_t kTinyCallBound = 6;
constexpr int kGraphCases = 100;
constexpr std::size_t kGraphMaxObjects = 200;
constexpr int kDeterminismSeeds = 100;
constexpr int kRoundTripBundles = 100;
constexpr int kMutationPlans = 50;
constexpr std::size_t kTable1MinServices = 30;
constexpr std::size_t kTable1MaxServices = 63;
constexpr std::size_t kTable2Services[] = {1041, 1090, 2198};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Run {
  SearchResult result;
  double seconds = 0;
};

Run compose(const InstanceBundle& b, const EngineConfig& config = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem problem(b);
  Run r{search_composition(problem, config), 0};
  r.seconds = seconds_since(t0);
  return r;
}

bool accepted(const InstanceBundle& b, const Run& r, const EngineConfig& config = {}) {
  return r.result.composition && validate_plan(b, to_plan_document(r.result, config)).accepted;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (pass) detail.str("");
    if (!pass) detail << "; ";
    pass = false;
    detail << why;
  }
};

Outcome criterion1() {
  Outcome o;
  const auto b = cases::motivating_bundle();
  const auto r = compose(b);
  if (!r.result.composition) {
    o.fail("not composed");
    return o;
  }
  const auto& c = *r.result.composition;
  std::map<std::string, int> calls;
  for (const auto& s : c.steps) {
    if (s.kind == StepKind::service) ++calls[s.name];
  }
  const std::map<std::string, int> want{{"getUniversityLocation", 2}, {"getAirplaneTicket", 1}};
  if (calls != want) o.fail("service steps differ");
  if (rule_step_count(c) != 2) o.fail("rule steps " + std::to_string(rule_step_count(c)));
  bool ticket = c.goal.size() == 1 && c.goal[0].object.rfind("getAirplaneTicket.", 0) == 0;
  if (!ticket) o.fail("goal not bound to a Ticket");
  if (!accepted(b, r)) o.fail("validator rejected");
  if (r.seconds >= kMotivatingSeconds) o.fail("took " + fmt(r.seconds) + " s");
  if (o.pass) o.detail << "3 calls, 2 rule steps, accepted, " << fmt(r.seconds) << " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto b = cases::motivating_bundle();
  EngineConfig config;
  config.apply_rules = false;
  const auto r = compose(b, config);
  if (r.result.report.verdict != Verdict::unsolvable) o.fail(std::string("verdict ") + to_string(r.result.report.verdict));
  if (r.seconds >= kMotivatingSeconds) o.fail("took " + fmt(r.seconds) + " s");
  if (o.pass) o.detail << "unsolvable in " << fmt(r.seconds) << " s";
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::ostringstream rows;
  for (const auto seed : kTable1Seeds) {
    for (int row = 0; row < kRelationalPresets; ++row) {
      const auto b = to_bundle(generate_instance(relational_preset(row, seed)));
      const std::string tag = "row " + std::to_string(row) + " seed " + std::to_string(seed);
      if (b.repository.size() < kTable1MinServices || b.repository.size() > kTable1MaxServices) {
        o.fail(tag + ": repository size " + std::to_string(b.repository.size()));
      }
      const auto with = compose(b);
      if (!with.result.composition) {
        o.fail(tag + ": not solved");
        continue;
      }
      if (with.seconds >= kTable1Seconds) o.fail(tag + ": took " + fmt(with.seconds) + " s");
      if (!accepted(b, with)) o.fail(tag + ": validator rejected");
      EngineConfig off;
      off.apply_rules = false;
      const auto without = compose(b, off);
      const auto len = service_step_count(*with.result.composition);
      rows << " " << b.repository.size() << "/" << len << "/";
      if (without.result.composition) {
        const auto len_off = service_step_count(*without.result.composition);
        rows << len_off;
        if (len > len_off) {
          o.fail(tag + ": " + std::to_string(len) + " calls with rules, " + std::to_string(len_off) + " without");
        }
      } else {
        rows << "-";
      }
    }
  }
  if (o.pass) o.detail << "repository/with/without:" << rows.str();
  return o;
}

Outcome criterion4() {
  Outcome o;
  for (int row = 0; row < kHierarchyPresets; ++row) {
    const auto b = to_bundle(generate_instance(hierarchy_preset(row, 1)));
    const std::string tag = "row " + std::to_string(row);
    if (b.repository.size() != kTable2Services[row]) o.fail(tag + ": size " + std::to_string(b.repository.size()));
    const auto r = compose(b);
    if (!r.result.composition) {
      o.fail(tag + ": not solved");
      continue;
    }
    if (r.seconds >= kTable2Seconds) o.fail(tag + ": took " + fmt(r.seconds) + " s");
    if (!accepted(b, r)) o.fail(tag + ": validator rejected");
    if (o.pass) {
      o.detail << " " << b.repository.size() << ":" << service_step_count(*r.result.composition) << "@"
               << fmt(r.seconds) << "s";
    }
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  Rng rng(5005);
  int agree = 0;
  for (int i = 0; i < kMatcherCases; ++i) {
    auto c = cases::random_matcher_case(rng);
    MatchOptions opts;
    opts.injective = c.injective;
    const auto got = find_match(c.spec, *c.knowledge, &c.history, opts);
    const auto all = oracle::all_matches(c.spec, *c.knowledge, &c.history, c.injective);
    bool ok = got.has_value() == !all.empty();
    if (ok && got) {
      ok = oracle::binding_satisfies(c.spec, *c.knowledge, *got, c.injective) && !c.history.contains(*got) &&
           *got == all.front();
    }
    if (ok) {
      ++agree;
    } else if (o.pass) {
      o.fail("case " + std::to_string(i) + " disagrees");
    }
  }
  if (!o.pass) o.detail << " (" << agree << "/" << kMatcherCases << ")";
  if (o.pass) o.detail << agree << "/" << kMatcherCases << " agree";
  return o;
}

Outcome criterion6() {
  Outcome o;
  Rng rng(6006);
  int agree = 0;
  int solvable = 0;
  for (int i = 0; i < kTinyInstances; ++i) {
    const auto b = cases::random_tiny_instance(rng);
    const auto r = compose(b);
    const bool engine = r.result.report.verdict == Verdict::composed;
    const bool brute = oracle::solvable_within(b, kTinyCallBound);
    solvable += brute;
    if (engine == brute && (!engine || accepted(b, r))) {
      ++agree;
    } else {
      o.fail("instance " + std::to_string(i) + ": engine " + to_string(r.result.report.verdict) + ", enumeration " +
             (brute ? "solvable" : "unsolvable"));
    }
  }
  o.detail << " (" << agree << "/" << kTinyInstances << " agree, " << solvable << " solvable)";
  return o;
}

Outcome criterion7() {
  Outcome o;
  Rng rng(7007);
  int agree = 0;
  for (int i = 0; i < kGraphCases; ++i) {
    const auto g = cases::random_graph_case(rng, kGraphMaxObjects);
    Knowledge kb(*g.ontology);
    for (std::size_t k = 0; k < g.objects; ++k) kb.add_object(ConceptId(1), Provenance{"g", "o", static_cast<std::uint32_t>(k)});
    std::set<oracle::Edge> raw;
    for (const auto& [r, s, t] : g.inserts) {
      kb.add_relation(RelationId(r), ObjectId(s), ObjectId(t));
      raw.emplace(r, s, t);
    }
    std::vector<bool> sym, trans;
    for (std::size_t r = 0; r < g.ontology->relation_count(); ++r) {
      sym.push_back(g.ontology->relation(RelationId(static_cast<std::uint32_t>(r))).symmetric);
      trans.push_back(g.ontology->relation(RelationId(static_cast<std::uint32_t>(r))).transitive);
    }
    if (oracle::knowledge_edges(kb) == oracle::closure(raw, g.objects, sym, trans) &&
        kb.fact_count() == oracle::knowledge_edges(kb).size()) {
      ++agree;
    } else {
      o.fail("graph " + std::to_string(i) + " differs");
    }
  }
  o.detail << " (" << agree << "/" << kGraphCases << " agree)";
  return o;
}

Outcome criterion8() {
  Outcome o;
  int good = 0;
  for (int seed = 1; seed <= kDeterminismSeeds; ++seed) {
    GenConfig config;
    config.seed = static_cast<std::uint64_t>(seed);
    const auto first = generate_instance(config);
    const auto files = render_instance(first, config);
    if (files != render_instance(generate_instance(config), config)) {
      o.fail("seed " + std::to_string(seed) + " not reproducible");
      continue;
    }
    const auto b = to_bundle(first);
    const auto r = compose(b);
    if (!accepted(b, r)) {
      o.fail("seed " + std::to_string(seed) + " not solved and accepted");
      continue;
    }
    ++good;
  }
  o.detail << " (" << good << "/" << kDeterminismSeeds << ")";
  return o;
}

Outcome criterion9() {
  Outcome o;
  int good = 0;
  for (int i = 0; i < kRoundTripBundles; ++i) {
    GenConfig config;
    config.seed = 9000 + static_cast<std::uint64_t>(i);
    const auto inst = generate_instance(config);
    const auto b = to_bundle(inst);
    auto draft = inst.ontology;
    draft.rules.clear();

    const auto onto = parse_ontology(write_ontology(draft));
    const auto rules = parse_rules(write_rules(inst.ontology.rules));
    const auto repo = parse_repository(write_repository(inst.repository));
    const auto query = parse_query(write_query(inst.query));
    const auto r = compose(b);
    const auto plan = to_plan_document(r.result, {});
    const auto plan2 = read_plan(write_plan(plan));

    std::string bad;
    if (!onto.value || *onto.value != draft) bad += " ontology";
    if (!rules.value || *rules.value != inst.ontology.rules) bad += " rules";
    if (!repo.value || *repo.value != inst.repository) bad += " repository";
    if (!query.value || *query.value != inst.query) bad += " query";
    if (!plan2.value || *plan2.value != plan) bad += " plan";
    if (bad.empty()) {
      ++good;
    } else {
      o.fail("bundle " + std::to_string(i) + ":" + bad);
    }
  }
  o.detail << " (" << good << "/" << kRoundTripBundles << ")";
  return o;
}

// Mutations. Each returns false if it does not apply to the plan.

std::map<std::string, std::string> object_types(const InstanceBundle& b, const PlanDocument& plan) {
  std::map<std::string, std::string> types;
  for (const auto& s : plan.steps) {
    const std::vector<ParamSpec>* params = nullptr;
    if (s.kind == StepKind::query) params = &b.query.inputs;
    for (const auto& svc : b.repository) {
      if (s.kind == StepKind::service && svc.name == s.name) params = &svc.outputs;
    }
    if (!params) continue;
    for (const auto& p : s.produced) {
      for (const auto& spec : *params) {
        if (spec.name == p.parameter) types[p.object] = spec.type;
      }
    }
  }
  return types;
}

bool delete_needed_step(const InstanceBundle&, PlanDocument& plan) {
  // A service step whose outputs are consumed later or named by the goal.
  for (std::size_t i = 1; i < plan.steps.size(); ++i) {
    if (plan.steps[i].kind != StepKind::service) continue;
    for (const auto& p : plan.steps[i].produced) {
      auto used = [&](const std::vector<NamedObject>& v) {
        return std::any_of(v.begin(), v.end(), [&](const NamedObject& n) { return n.object == p.object; });
      };
      bool needed = used(plan.goal);
      for (std::size_t j = i + 1; j < plan.steps.size() && !needed; ++j) needed = used(plan.steps[j].binding);
      if (needed) {
        plan.steps.erase(plan.steps.begin() + static_cast<std::ptrdiff_t>(i));
        return true;
      }
    }
  }
  return false;
}

bool retarget_binding(const InstanceBundle& b, PlanDocument& plan) {
  const auto types = object_types(b, plan);
  const Ontology& onto = b.ontology;
  for (std::size_t i = 1; i < plan.steps.size(); ++i) {
    auto& s = plan.steps[i];
    if (s.kind != StepKind::service) continue;
    const ServiceDef* svc = nullptr;
    for (const auto& d : b.repository) {
      if (d.name == s.name) svc = &d;
    }
    for (auto& slot : s.binding) {
      std::string want;
      for (const auto& p : svc->inputs) {
        if (p.name == slot.parameter) want = p.type;
      }
      for (const auto& [name, type] : types) {
        if (!onto.is_subtype_of(type, want)) {
          slot.object = name;
          return true;
        }
      }
    }
  }
  return false;
}

bool rename_atom(const InstanceBundle& b, PlanDocument& plan) {
  for (auto& s : plan.steps) {
    if (s.kind == StepKind::query || s.asserted.empty()) continue;
    auto& fact = s.asserted.front();
    for (std::size_t r = 0; r < b.ontology.relation_count(); ++r) {
      const auto& other = b.ontology.relation_name(RelationId(static_cast<std::uint32_t>(r)));
      if (other != fact.relation) {
        fact.relation = other;
        return true;
      }
    }
  }
  return false;
}

Outcome criterion10() {
  Outcome o;
  const std::pair<const char*, std::function<bool(const InstanceBundle&, PlanDocument&)>> mutations[] = {
      {"delete", delete_needed_step}, {"retarget", retarget_binding}, {"rename", rename_atom}};
  std::map<std::string, int> applied, rejected;
  int plans = 0;
  for (std::uint64_t seed = 10000; plans < kMutationPlans; ++seed) {
    GenConfig config;
    config.seed = seed;
    const auto b = to_bundle(generate_instance(config));
    const auto r = compose(b);
    if (!r.result.composition) continue;
    const auto plan = to_plan_document(r.result, {});
    if (!validate_plan(b, plan).accepted) {
      o.fail("seed " + std::to_string(seed) + ": unmutated plan rejected");
      continue;
    }
    ++plans;
    for (const auto& [name, mutate] : mutations) {
      auto copy = plan;
      if (!mutate(b, copy)) continue;
      ++applied[name];
      if (!validate_plan(b, copy).accepted) {
        ++rejected[name];
      } else {
        o.fail(std::string(name) + " on seed " + std::to_string(seed) + " accepted");
      }
    }
  }
  for (const auto& [name, _] : mutations) {
    o.detail << " " << name << " " << rejected[name] << "/" << applied[name];
    if (applied[name] == 0) o.fail(std::string(name) + " never applied");
  }
  return o;
}

}  // namespace

int main() {
  const std::function<Outcome()> criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                               criterion6, criterion7, criterion8, criterion9, criterion10};
  int failed = 0;
  for (std::size_t i = 0; i < std::size(criteria); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    auto detail = o.detail.str();
    detail.erase(0, detail.find_first_not_of(' ') == std::string::npos ? detail.size() : detail.find_first_not_of(' '));
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " " << detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

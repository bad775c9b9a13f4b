#include "relcompose/validator.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <type_traits>

#include "relcompose/knowledge.hpp"

namespace relcompose {

namespace {

struct Shape {
  std::string name;
  std::vector<ParamSpec> inputs;
  std::vector<ParamSpec> outputs;
  std::vector<RelationAtom> preconditions;
  std::vector<RelationAtom> effects;
};

Shape shape_of(const ServiceDef& s) {
  Shape out{s.name, s.inputs, s.outputs, {}, {}};
  std::set<std::string> in;
  for (const auto& p : s.inputs) in.insert(p.name);
  for (const auto& a : s.relations) {
    (in.contains(a.source) && in.contains(a.target) ? out.preconditions : out.effects).push_back(a);
  }
  return out;
}

Shape seed_shape(const ServiceDef& query) {
  Shape out{"query", {}, query.inputs, {}, {}};
  std::set<std::string> in;
  for (const auto& p : query.inputs) in.insert(p.name);
  for (const auto& a : query.relations) {
    if (in.contains(a.source) && in.contains(a.target)) out.effects.push_back(a);
  }
  return out;
}

std::string fact_text(const FactRef& f) { return f.relation + "(" + f.source + ", " + f.target + ")"; }

template <class T>
std::vector<T> sorted(std::vector<T> v) {
  std::sort(v.begin(), v.end(), [](const T& a, const T& b) {
    if constexpr (std::is_same_v<T, FactRef>) {
      return std::tie(a.relation, a.source, a.target) < std::tie(b.relation, b.source, b.target);
    } else {
      return std::tie(a.parameter, a.object) < std::tie(b.parameter, b.object);
    }
  });
  return v;
}

class Replay {
 public:
  Replay(const InstanceBundle& bundle, DedupMode dedup) : bundle_(bundle), kb_(bundle.ontology), dedup_(dedup) {}

  const Knowledge& knowledge() const { return kb_; }
  const std::map<std::string, ObjectId>& query_objects() const { return query_objects_; }

  /// Resolves a named binding against the current knowledge. Empty string on success.
  std::string bind(const std::vector<std::string>& params, const std::vector<NamedObject>& named,
                   std::map<std::string, ObjectId>& local) {
    if (named.size() != params.size()) {
      return "expects " + std::to_string(params.size()) + " bound parameters, plan gives " +
             std::to_string(named.size());
    }
    for (const auto& p : params) {
      const auto n = std::count_if(named.begin(), named.end(), [&](const NamedObject& x) { return x.parameter == p; });
      if (n != 1) return "parameter '" + p + "' must be bound exactly once";
      const auto& entry = *std::find_if(named.begin(), named.end(), [&](const NamedObject& x) { return x.parameter == p; });
      auto id = kb_.find_object(entry.object);
      if (!id) return "object '" + entry.object + "' bound to '" + p + "' does not exist at this point";
      local[p] = *id;
    }
    return {};
  }

  std::string holds(const std::vector<RelationAtom>& atoms, const std::map<std::string, ObjectId>& local,
                    std::string_view what) const {
    for (const auto& a : atoms) {
      if (!kb_.has_relation(a.relation, local.at(a.source), local.at(a.target))) {
        return std::string(what) + " " + a.relation + "(" + a.source + ", " + a.target + ") does not hold";
      }
    }
    return {};
  }

  std::string service_like(const Shape& s, const Invocation& step, std::uint32_t call_index, bool dedup = true) {
    std::map<std::string, ObjectId> local;
    std::vector<std::string> params;
    for (const auto& p : s.inputs) params.push_back(p.name);
    if (auto why = bind(params, step.binding, local); !why.empty()) return why;
    const auto& onto = bundle_.ontology;
    for (const auto& p : s.inputs) {
      const auto& got = onto.concept_name(kb_.object(local[p.name]).type);
      if (!onto.is_subtype_of(got, p.type)) {
        return "parameter '" + p.name + "' expects " + p.type + " but object has type " + got;
      }
    }
    if (auto why = holds(s.preconditions, local, "precondition"); !why.empty()) return why;

    std::vector<ObjectId> fresh;
    try {
      for (const auto& p : s.outputs) {
        auto [id, created] = kb_.add_object(p.type, Provenance{s.name, p.name, call_index});
        (void)created;
        local[p.name] = id;
        fresh.push_back(id);
      }
    } catch (const Error& e) {
      return std::string("cannot create outputs: ") + e.what();
    }
    for (const auto& a : s.effects) kb_.add_relation(a.relation, local.at(a.source), local.at(a.target));
    const auto merged = dedup ? kb_.dedup_new_objects(fresh, dedup_) : MergeMap{};
    for (auto& [name, id] : local) {
      if (auto it = merged.find(id); it != merged.end()) id = it->second;
    }

    std::vector<NamedObject> produced;
    for (const auto& p : s.outputs) produced.push_back(NamedObject{p.name, kb_.object(local[p.name]).name});
    if (sorted(produced) != sorted(step.produced)) {
      std::string want;
      for (const auto& p : produced) want += " " + p.parameter + "=" + p.object;
      return "produced objects differ from replay (expected" + want + ")";
    }
    std::vector<FactRef> asserted;
    for (const auto& a : s.effects) {
      asserted.push_back(FactRef{a.relation, kb_.object(local.at(a.source)).name, kb_.object(local.at(a.target)).name});
    }
    if (auto why = compare_facts(asserted, step.asserted); !why.empty()) return why;
    if (step.kind == StepKind::query) query_objects_ = local;
    return {};
  }

  std::string rule(const InferenceRule& r, const Invocation& step) {
    std::map<std::string, ObjectId> local;
    if (auto why = bind(r.variables, step.binding, local); !why.empty()) return why;
    if (!step.produced.empty()) return "a rule step cannot produce objects";
    if (auto why = holds(r.premise, local, "premise"); !why.empty()) return why;
    std::vector<FactRef> asserted;
    for (const auto& c : r.conclusion) {
      kb_.add_relation(c.relation, local.at(c.source), local.at(c.target));
      asserted.push_back(FactRef{c.relation, kb_.object(local.at(c.source)).name, kb_.object(local.at(c.target)).name});
    }
    return compare_facts(asserted, step.asserted);
  }

 private:
  static std::string compare_facts(const std::vector<FactRef>& replayed, const std::vector<FactRef>& plan) {
    const auto a = sorted(replayed);
    const auto b = sorted(plan);
    if (a == b) return {};
    for (const auto& f : b) {
      if (std::find(a.begin(), a.end(), f) == a.end()) return "asserted fact " + fact_text(f) + " is not an effect of this step";
    }
    for (const auto& f : a) {
      if (std::find(b.begin(), b.end(), f) == b.end()) return "effect " + fact_text(f) + " missing from the plan";
    }
    return "asserted facts differ from replay";
  }

  const InstanceBundle& bundle_;
  Knowledge kb_;
  DedupMode dedup_;
  std::map<std::string, ObjectId> query_objects_;
};

}  // namespace

ValidationReport validate_plan(const InstanceBundle& bundle, const PlanDocument& plan) {
  ValidationReport report;
  auto fail = [&](std::size_t step, std::string reason) {
    report.failures.push_back(ValidationFailure{step, std::move(reason)});
  };

  if (plan.verdict != Verdict::composed) {
    fail(0, std::string("plan verdict is ") + to_string(plan.verdict));
    return report;
  }
  if (plan.steps.empty() || plan.steps.front().kind != StepKind::query) {
    fail(0, "step 0 must be the query step");
    return report;
  }

  Replay replay(bundle, plan.dedup);
  std::map<std::string, std::uint32_t> calls;
  bool ok = true;
  for (std::size_t i = 0; i < plan.steps.size() && ok; ++i) {
    const auto& step = plan.steps[i];
    std::string why;
    if (i == 0) {
      // query inputs are never merged
      why = replay.service_like(seed_shape(bundle.query), step, 0, false);
    } else if (step.kind == StepKind::query) {
      why = "only step 0 may be the query step";
    } else if (step.kind == StepKind::service) {
      auto it = std::find_if(bundle.repository.begin(), bundle.repository.end(),
                             [&](const ServiceDef& s) { return s.name == step.name; });
      if (it == bundle.repository.end()) {
        why = "unknown service '" + step.name + "'";
      } else {
        why = replay.service_like(shape_of(*it), step, ++calls[step.name]);
      }
    } else {
      const auto& rules = bundle.ontology.rule_decls();
      auto it = std::find_if(rules.begin(), rules.end(), [&](const InferenceRule& r) { return r.name == step.name; });
      why = it == rules.end() ? "unknown rule '" + step.name + "'" : replay.rule(*it, step);
    }
    if (!why.empty()) {
      fail(i, step.name + ": " + why);
      ok = false;
    } else {
      ++report.steps_replayed;
    }
  }

  if (ok) {
    const auto& kb = replay.knowledge();
    const auto& onto = bundle.ontology;
    std::map<std::string, ObjectId> local = replay.query_objects();
    const std::size_t goal_step = plan.steps.size();
    std::set<std::string> outputs;
    for (const auto& p : bundle.query.outputs) outputs.insert(p.name);
    if (plan.goal.size() != bundle.query.outputs.size()) {
      fail(goal_step, "goal binds " + std::to_string(plan.goal.size()) + " objects, query requires " +
                          std::to_string(bundle.query.outputs.size()));
    }
    for (const auto& p : bundle.query.outputs) {
      auto it = std::find_if(plan.goal.begin(), plan.goal.end(), [&](const NamedObject& g) { return g.parameter == p.name; });
      if (it == plan.goal.end()) {
        fail(goal_step, "goal does not bind query output '" + p.name + "'");
        continue;
      }
      auto id = kb.find_object(it->object);
      if (!id) {
        fail(goal_step, "goal object '" + it->object + "' does not exist");
        continue;
      }
      if (!onto.is_subtype_of(kb.object(*id).type, onto.concept_id(p.type))) {
        fail(goal_step, "goal object '" + it->object + "' is not a " + p.type);
        continue;
      }
      local[p.name] = *id;
    }
    if (report.failures.empty()) {
      for (const auto& a : bundle.query.relations) {
        if (!outputs.contains(a.source) && !outputs.contains(a.target)) continue;
        if (!kb.has_relation(a.relation, local.at(a.source), local.at(a.target))) {
          fail(goal_step, "required " + a.relation + "(" + a.source + ", " + a.target + ") does not hold");
        }
      }
    }
  }

  report.objects = replay.knowledge().object_count();
  report.facts = replay.knowledge().fact_count();
  report.accepted = report.failures.empty();
  return report;
}

std::string format_validation(const ValidationReport& report) {
  std::ostringstream out;
  out << "accepted: " << (report.accepted ? "yes" : "no") << '\n';
  out << "steps-replayed: " << report.steps_replayed << '\n';
  out << "objects: " << report.objects << '\n';
  out << "facts: " << report.facts << '\n';
  for (const auto& f : report.failures) out << "failure: step " << f.step << ": " << f.reason << '\n';
  return out.str();
}

}  // namespace relcompose

#include <algorithm>
#include <unordered_map>

#include "relcompose/engine.hpp"

namespace relcompose {

namespace {

std::optional<std::size_t> find_rule(const Ontology& onto, std::string_view name) {
  const auto& rules = onto.rules();
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (rules[i].name == name) return i;
  }
  return std::nullopt;
}

/// Binding in parameter order from a named binding, through `ids`.
std::optional<Binding> resolve(const std::vector<std::string>& params, std::size_t count,
                               const std::vector<NamedObject>& named,
                               const std::unordered_map<std::string, ObjectId>& ids) {
  if (named.size() != count) return std::nullopt;
  Binding b;
  b.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto it = std::find_if(named.begin(), named.end(), [&](const NamedObject& n) { return n.parameter == params[i]; });
    if (it == named.end()) return std::nullopt;
    auto id = ids.find(it->object);
    if (id == ids.end()) return std::nullopt;
    b.push_back(id->second);
  }
  return b;
}

/// Original names map to replay objects at creation only: when an output
/// was merged into an older object in the original run, that name is
/// already mapped.
bool map_produced(const std::vector<std::string>& params, std::size_t first_output,
                  const std::vector<NamedObject>& produced, const std::vector<ObjectId>& replayed,
                  std::unordered_map<std::string, ObjectId>& ids) {
  if (produced.size() != replayed.size()) return false;
  for (const auto& p : produced) {
    auto it = std::find(params.begin() + static_cast<std::ptrdiff_t>(first_output), params.end(), p.parameter);
    if (it == params.end()) return false;
    ids.try_emplace(p.object, replayed[static_cast<std::size_t>(it - params.begin()) - first_output]);
  }
  return true;
}

}  // namespace

namespace {

/// Executes `steps` on a fresh, unseeded `state`; returns the goal binding.
std::optional<Binding> replay(const Problem& problem, std::span<const Invocation> steps, CompositionState& state) {
  if (steps.empty() || steps.front().kind != StepKind::query) return std::nullopt;
  std::unordered_map<std::string, ObjectId> ids;

  const auto& seed = state.seed();
  if (!map_produced(problem.seed().params, 0, steps.front().produced, seed.produced, ids)) return std::nullopt;

  for (const auto& step : steps.subspan(1)) {
    if (step.kind == StepKind::service) {
      auto s = problem.find_service(step.name);
      if (!s) return std::nullopt;
      const auto& svc = problem.services()[*s];
      auto b = resolve(svc.params, svc.input_count, step.binding, ids);
      if (!b || !state.check_service_binding(*s, *b).empty()) return std::nullopt;
      const auto& rec = state.call_service(*s, *b);
      if (!map_produced(svc.params, svc.input_count, step.produced, rec.produced, ids)) return std::nullopt;
    } else if (step.kind == StepKind::rule) {
      auto r = find_rule(problem.ontology(), step.name);
      if (!r) return std::nullopt;
      const auto& vars = problem.ontology().rules()[*r].variables;
      auto b = resolve(vars, vars.size(), step.binding, ids);
      if (!b || !state.check_rule_binding(*r, *b).empty()) return std::nullopt;
      state.apply_rule(*r, *b);
    } else {
      return std::nullopt;
    }
  }
  return state.goal_test();
}

}  // namespace

std::optional<Composition> renormalize(const Problem& problem, std::span<const Invocation> steps,
                                       const EngineConfig& config) {
  CompositionState state(problem, config);
  auto goal = replay(problem, steps, state);
  if (!goal) return std::nullopt;
  Composition out;
  for (const auto& rec : state.trace()) out.steps.push_back(rec.invocation);
  for (std::size_t k = problem.query_input_count(); k < goal->size(); ++k) {
    out.goal.push_back(NamedObject{problem.goal_params()[k], state.knowledge().object((*goal)[k]).name});
  }
  return out;
}

std::optional<Composition> prune_steps(const Problem& problem, std::span<const Invocation> steps,
                                       const EngineConfig& config) {
  CompositionState state(problem, config);
  auto goal = replay(problem, steps, state);
  if (!goal) return std::nullopt;
  return prune_composition(problem, state, *goal, config);
}

Composition prune_composition(const Problem& problem, const CompositionState& state, const Binding& goal,
                              const EngineConfig& config) {
  const auto& trace = state.trace();
  const auto& kb = state.knowledge();
  std::vector<bool> needed(trace.size(), false);
  std::vector<bool> seen_triple(kb.triples().size(), false);
  std::vector<std::size_t> step_stack;
  std::vector<TripleIndex> triple_stack;

  auto need_step = [&](std::size_t s) {
    if (!needed[s]) {
      needed[s] = true;
      step_stack.push_back(s);
    }
  };
  auto need_object = [&](ObjectId o) { need_step(state.creator(o)); };
  auto need_triple = [&](TripleIndex t) {
    if (!seen_triple[t]) {
      seen_triple[t] = true;
      triple_stack.push_back(t);
    }
  };

  need_step(0);
  for (ObjectId o : goal) need_object(o);
  for (const auto& a : problem.goal_spec().atoms) {
    if (auto t = kb.find_triple(a.relation, goal[a.source], goal[a.target])) need_triple(*t);
  }

  while (!step_stack.empty() || !triple_stack.empty()) {
    if (!triple_stack.empty()) {
      const TripleIndex t = triple_stack.back();
      triple_stack.pop_back();
      const auto& fact = kb.triple(t);
      need_object(fact.source);
      need_object(fact.target);
      if (!fact.derived) {
        need_step(state.origin(t));
        continue;
      }
      // A closure fact depends on its supports; if one of them was retired by
      // deduplication the step that added this fact is kept as well.
      for (TripleIndex s : fact.support) {
        if (s == kNoTriple) continue;
        if (!kb.triple(s).alive) need_step(state.origin(t));
        need_triple(s);
      }
      continue;
    }
    const std::size_t s = step_stack.back();
    step_stack.pop_back();
    for (ObjectId o : trace[s].binding) need_object(o);
    for (TripleIndex t : trace[s].used) need_triple(t);
  }

  std::vector<Invocation> kept;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (needed[i]) kept.push_back(trace[i].invocation);
  }

  std::vector<Invocation> full;
  for (const auto& rec : trace) full.push_back(rec.invocation);
  if (!renormalize(problem, kept, config)) kept = full;

  // Drop any single step whose removal still replays to the goal, until no
  // step can go.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = kept.size(); i-- > 1;) {
      std::vector<Invocation> candidate = kept;
      candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(i));
      if (renormalize(problem, candidate, config)) {
        kept = std::move(candidate);
        changed = true;
      }
    }
  }

  if (auto c = renormalize(problem, kept, config)) return *c;
  Composition fallback;
  fallback.steps = std::move(full);
  for (std::size_t k = problem.query_input_count(); k < goal.size(); ++k) {
    fallback.goal.push_back(NamedObject{problem.goal_params()[k], kb.object(goal[k]).name});
  }
  return fallback;
}

}  // namespace relcompose

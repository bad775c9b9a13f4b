#include "relcompose/engine.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

namespace relcompose {

namespace {

CompiledService compile_service(const Ontology& onto, const ServiceDef& def) {
  CompiledService out;
  out.name = def.name;
  out.input_count = def.inputs.size();
  std::unordered_map<std::string, std::uint32_t> pos;
  for (const auto& p : def.inputs) {
    pos.emplace(p.name, static_cast<std::uint32_t>(out.params.size()));
    out.params.push_back(p.name);
    out.preconditions.types.emplace_back(onto.concept_id(p.type));
  }
  for (const auto& p : def.outputs) {
    pos.emplace(p.name, static_cast<std::uint32_t>(out.params.size()));
    out.params.push_back(p.name);
    out.output_types.push_back(onto.concept_id(p.type));
  }
  auto lookup = [&](const std::string& name) {
    auto it = pos.find(name);
    if (it == pos.end()) throw Error("service '" + def.name + "': relation endpoint '" + name + "' is not a parameter");
    return it->second;
  };
  for (const auto& a : def.relations) {
    LocalAtom atom{onto.relation_id(a.relation), lookup(a.source), lookup(a.target)};
    if (atom.source < out.input_count && atom.target < out.input_count) {
      out.preconditions.atoms.push_back(atom);
    } else {
      out.effects.push_back(atom);
      out.effect_decls.push_back(a);
    }
  }
  return out;
}

}  // namespace

Problem::Problem(const Ontology& ontology, std::span<const ServiceDef> repository, const ServiceDef& query)
    : ontology_(&ontology) {
  services_.reserve(repository.size());
  for (const auto& s : repository) services_.push_back(compile_service(ontology, s));

  // The seed has no inputs: the query inputs are its outputs and the known
  // input x input facts its effects.
  ServiceDef seed_def{"query", {}, query.inputs, {}};
  std::set<std::string> input_names;
  for (const auto& p : query.inputs) input_names.insert(p.name);
  for (const auto& a : query.relations) {
    if (input_names.contains(a.source) && input_names.contains(a.target)) seed_def.relations.push_back(a);
  }
  seed_ = compile_service(ontology, seed_def);

  const auto goal = compile_service(ontology, ServiceDef{"goal", query.inputs, query.outputs, query.relations});
  query_inputs_ = query.inputs.size();
  goal_params_ = goal.params;
  goal_spec_.types = goal.preconditions.types;
  for (ConceptId t : goal.output_types) goal_spec_.types.emplace_back(t);
  goal_spec_.atoms = goal.effects;
}

std::optional<std::size_t> Problem::find_service(std::string_view name) const {
  for (std::size_t i = 0; i < services_.size(); ++i) {
    if (services_[i].name == name) return i;
  }
  return std::nullopt;
}

CompositionState::CompositionState(const Problem& problem, const EngineConfig& config)
    : problem_(&problem),
      config_(config),
      match_options_{config.injective, true},
      knowledge_(problem.ontology()),
      service_history_(problem.services().size()),
      rule_history_(problem.ontology().rules().size()),
      call_counts_(problem.services().size(), 0) {}

NamedObject CompositionState::named(const std::string& param, ObjectId id) const {
  return NamedObject{param, knowledge_.object(id).name};
}

std::vector<TripleIndex> CompositionState::used_facts(std::span<const LocalAtom> atoms,
                                                      const Binding& binding) const {
  std::vector<TripleIndex> out;
  for (const auto& a : atoms) {
    if (auto t = knowledge_.find_triple(a.relation, binding[a.source], binding[a.target])) out.push_back(*t);
  }
  return out;
}

void CompositionState::note_added(std::span<const TripleIndex> added, std::size_t step) {
  if (origin_.size() < knowledge_.triples().size()) origin_.resize(knowledge_.triples().size(), 0);
  for (TripleIndex t : added) origin_[t] = step;
}

namespace {

/// Creates the outputs, asserts effects and deduplicates unless `dedup` is
/// empty. `local` holds the input binding on entry and every position on exit.
template <class OnCreate>
std::vector<TripleIndex> run_effects(Knowledge& kb, const CompiledService& svc, std::uint32_t call_index,
                                     std::optional<DedupMode> dedup, std::vector<ObjectId>& local,
                                     OnCreate on_create) {
  std::vector<TripleIndex> added;
  std::vector<ObjectId> fresh;
  for (std::size_t k = 0; k < svc.output_types.size(); ++k) {
    auto [id, created] = kb.add_object(svc.output_types[k],
                                       Provenance{svc.name, svc.params[svc.input_count + k], call_index});
    (void)created;
    on_create(id);
    local.push_back(id);
    fresh.push_back(id);
  }
  for (const auto& e : svc.effects) {
    auto more = kb.add_relation(e.relation, local[e.source], local[e.target]);
    added.insert(added.end(), more.begin(), more.end());
  }
  if (!dedup) return added;
  const auto merged = kb.dedup_new_objects(fresh, *dedup, &added);
  for (auto& id : local) {
    if (auto it = merged.find(id); it != merged.end()) id = it->second;
  }
  return added;
}

}  // namespace

const StepRecord& CompositionState::seed() {
  if (seeded_) throw Error("composition state already seeded");
  seeded_ = true;
  const auto& svc = problem_->seed();
  const std::size_t step = trace_.size();
  StepRecord rec;
  rec.kind = StepKind::query;
  std::vector<ObjectId> local;
  // Query inputs are distinct by definition, even when indistinguishable.
  rec.added = run_effects(knowledge_, svc, 0, std::nullopt, local, [&](ObjectId) { creator_.push_back(step); });
  note_added(rec.added, step);
  rec.produced = local;

  rec.invocation.kind = StepKind::query;
  rec.invocation.name = svc.name;
  for (std::size_t k = 0; k < local.size(); ++k) rec.invocation.produced.push_back(named(svc.params[k], local[k]));
  for (const auto& a : svc.effect_decls) {
    auto idx = [&](const std::string& p) {
      return local[std::find(svc.params.begin(), svc.params.end(), p) - svc.params.begin()];
    };
    rec.invocation.asserted.push_back(
        FactRef{a.relation, knowledge_.object(idx(a.source)).name, knowledge_.object(idx(a.target)).name});
  }
  trace_.push_back(std::move(rec));
  return trace_.back();
}

std::optional<Binding> CompositionState::find_service_match(std::size_t service) const {
  return find_match(problem_->services().at(service).preconditions, knowledge_, &service_history_[service],
                    match_options_);
}

std::optional<Binding> CompositionState::find_rule_match(std::size_t rule) const {
  return relcompose::find_rule_match(problem_->ontology().rules().at(rule), knowledge_, rule_history_[rule],
                                     match_options_);
}

std::string CompositionState::check_service_binding(std::size_t service, const Binding& binding) const {
  const auto& svc = problem_->services().at(service);
  if (binding.size() != svc.input_count) return "binding has wrong arity";
  for (std::size_t i = 0; i < binding.size(); ++i) {
    if (!knowledge_.is_live(binding[i])) return "parameter '" + svc.params[i] + "' bound to an unknown object";
    const auto want = *svc.preconditions.types[i];
    if (!problem_->ontology().is_subtype_of(knowledge_.object(binding[i]).type, want)) {
      return "parameter '" + svc.params[i] + "' expects " + problem_->ontology().concept_name(want);
    }
    if (config_.injective && std::find(binding.begin(), binding.begin() + i, binding[i]) != binding.begin() + i) {
      return "object bound twice in injective mode";
    }
  }
  for (const auto& a : svc.preconditions.atoms) {
    if (!knowledge_.has_relation(a.relation, binding[a.source], binding[a.target])) {
      return "precondition " + problem_->ontology().relation_name(a.relation) + "(" + svc.params[a.source] + ", " +
             svc.params[a.target] + ") does not hold";
    }
  }
  if (service_history_[service].contains(binding)) return "binding already used";
  return {};
}

std::string CompositionState::check_rule_binding(std::size_t rule, const Binding& binding) const {
  const auto& r = problem_->ontology().rules().at(rule);
  if (binding.size() != r.variables.size()) return "binding has wrong arity";
  for (std::size_t i = 0; i < binding.size(); ++i) {
    if (!knowledge_.is_live(binding[i])) return "variable '" + r.variables[i] + "' bound to an unknown object";
    if (config_.injective && std::find(binding.begin(), binding.begin() + i, binding[i]) != binding.begin() + i) {
      return "object bound twice in injective mode";
    }
  }
  for (const auto& a : r.premise) {
    if (!knowledge_.has_relation(a.relation, binding[a.source], binding[a.target])) {
      return "premise " + problem_->ontology().relation_name(a.relation) + "(" + r.variables[a.source] + ", " +
             r.variables[a.target] + ") does not hold";
    }
  }
  if (rule_history_[rule].contains(binding)) return "binding already used";
  return {};
}

const StepRecord& CompositionState::call_service(std::size_t service, const Binding& binding) {
  if (!seeded_) throw Error("call_service before seed");
  if (auto why = check_service_binding(service, binding); !why.empty()) {
    throw Error("service '" + problem_->services().at(service).name + "' not callable: " + why);
  }
  const auto& svc = problem_->services()[service];
  const std::size_t step = trace_.size();
  service_history_[service].record(binding);
  const auto call_index = ++call_counts_[service];
  ++service_calls_;

  StepRecord rec;
  rec.kind = StepKind::service;
  rec.index = service;
  rec.binding = binding;
  rec.used = used_facts(svc.preconditions.atoms, binding);
  std::vector<ObjectId> local = binding;
  rec.added = run_effects(knowledge_, svc, call_index, config_.dedup, local,
                          [&](ObjectId) { creator_.push_back(step); });
  note_added(rec.added, step);
  rec.produced.assign(local.begin() + static_cast<std::ptrdiff_t>(svc.input_count), local.end());

  auto& inv = rec.invocation;
  inv.kind = StepKind::service;
  inv.name = svc.name;
  for (std::size_t i = 0; i < local.size(); ++i) {
    (i < svc.input_count ? inv.binding : inv.produced).push_back(named(svc.params[i], local[i]));
  }
  for (std::size_t e = 0; e < svc.effects.size(); ++e) {
    inv.asserted.push_back(FactRef{svc.effect_decls[e].relation, knowledge_.object(local[svc.effects[e].source]).name,
                                   knowledge_.object(local[svc.effects[e].target]).name});
  }
  trace_.push_back(std::move(rec));
  return trace_.back();
}

const StepRecord& CompositionState::apply_rule(std::size_t rule, const Binding& binding) {
  if (!seeded_) throw Error("apply_rule before seed");
  if (auto why = check_rule_binding(rule, binding); !why.empty()) {
    throw Error("rule '" + problem_->ontology().rules().at(rule).name + "' not applicable: " + why);
  }
  const auto& r = problem_->ontology().rules()[rule];
  const std::size_t step = trace_.size();
  rule_history_[rule].record(binding);
  ++rule_applications_;

  StepRecord rec;
  rec.kind = StepKind::rule;
  rec.index = rule;
  rec.binding = binding;
  rec.used = used_facts(r.premise, binding);
  for (const auto& c : r.conclusion) {
    auto more = knowledge_.add_relation(c.relation, binding[c.source], binding[c.target]);
    rec.added.insert(rec.added.end(), more.begin(), more.end());
  }
  note_added(rec.added, step);

  auto& inv = rec.invocation;
  inv.kind = StepKind::rule;
  inv.name = r.name;
  for (std::size_t i = 0; i < binding.size(); ++i) inv.binding.push_back(named(r.variables[i], binding[i]));
  for (const auto& c : r.conclusion) {
    inv.asserted.push_back(FactRef{problem_->ontology().relation_name(c.relation),
                                   knowledge_.object(binding[c.source]).name,
                                   knowledge_.object(binding[c.target]).name});
  }
  trace_.push_back(std::move(rec));
  return trace_.back();
}

std::size_t CompositionState::apply_inference_rules() {
  std::size_t total = 0;
  const auto n = problem_->ontology().rules().size();
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t r = 0; r < n; ++r) {
      while (auto b = find_rule_match(r)) {
        apply_rule(r, *b);
        ++total;
        progress = true;
      }
    }
  }
  return total;
}

std::optional<Binding> CompositionState::goal_test() const {
  if (!seeded_) return std::nullopt;
  std::vector<std::optional<ObjectId>> fixed(trace_.front().produced.begin(), trace_.front().produced.end());
  return find_match(problem_->goal_spec(), knowledge_, nullptr, MatchOptions{}, fixed);
}

std::vector<Binding> CompositionState::goal_bindings(std::size_t limit) const {
  std::vector<Binding> out;
  if (!seeded_) return out;
  std::vector<std::optional<ObjectId>> fixed(trace_.front().produced.begin(), trace_.front().produced.end());
  CallHistory seen;
  while (out.size() < limit) {
    auto b = find_match(problem_->goal_spec(), knowledge_, &seen, MatchOptions{}, fixed);
    if (!b) break;
    seen.record(*b);
    out.push_back(std::move(*b));
  }
  return out;
}

SearchResult search_composition(const Problem& problem, const EngineConfig& config) {
  if (config.max_sweeps < 1) throw Error("max_sweeps must be at least 1");
  const auto start = std::chrono::steady_clock::now();

  CompositionState state(problem, config);
  state.seed();
  if (config.apply_rules) state.apply_inference_rules();

  SearchResult result;
  auto& report = result.report;
  report.seed_note = config.seed_note;
  std::optional<Binding> goal;
  for (;;) {
    goal = state.goal_test();
    if (goal) {
      report.verdict = Verdict::composed;
      break;
    }
    if (report.sweeps >= config.max_sweeps) {
      report.verdict = Verdict::budget_exceeded;
      break;
    }
    ++report.sweeps;
    bool new_call = false;
    for (std::size_t s = 0; s < problem.services().size(); ++s) {
      if (auto b = state.find_service_match(s)) {
        state.call_service(s, *b);
        new_call = true;
      }
    }
    if (config.apply_rules) state.apply_inference_rules();
    if (!new_call) {
      goal = state.goal_test();
      report.verdict = goal ? Verdict::composed : Verdict::unsolvable;
      break;
    }
  }

  for (const auto& rec : state.trace()) result.trace.push_back(rec.invocation);
  if (goal) {
    if (config.prune) {
      // Different goal objects can hang off different parts of the trace.
      for (const auto& g : state.goal_bindings(std::max<std::uint32_t>(config.goal_candidates, 1))) {
        auto c = prune_composition(problem, state, g, config);
        if (!result.composition || service_step_count(c) < service_step_count(*result.composition) ||
            (service_step_count(c) == service_step_count(*result.composition) &&
             c.steps.size() < result.composition->steps.size())) {
          result.composition = std::move(c);
        }
      }
    } else {
      Composition c;
      c.steps = result.trace;
      for (std::size_t k = problem.query_input_count(); k < goal->size(); ++k) {
        c.goal.push_back(NamedObject{problem.goal_params()[k], state.knowledge().object((*goal)[k]).name});
      }
      result.composition = std::move(c);
    }
  }

  report.service_calls = state.service_calls();
  report.rule_applications = state.rule_applications();
  report.objects = state.knowledge().object_count();
  report.facts = state.knowledge().fact_count();
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

PlanDocument to_plan_document(const SearchResult& result, const EngineConfig& config) {
  PlanDocument doc;
  doc.verdict = result.report.verdict;
  doc.dedup = config.dedup;
  if (result.composition) {
    doc.steps = result.composition->steps;
    doc.goal = result.composition->goal;
  }
  doc.stats.sweeps = result.report.sweeps;
  doc.stats.service_calls = result.report.service_calls;
  doc.stats.rule_applications = result.report.rule_applications;
  return doc;
}

}  // namespace relcompose

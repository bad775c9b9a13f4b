#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relcompose/knowledge.hpp"
#include "relcompose/matcher.hpp"
#include "relcompose/model.hpp"

namespace relcompose {

/// A service (or the query seed) resolved against the ontology. Positions
/// 0..inputs-1 are inputs, the rest outputs.
struct CompiledService {
  std::string name;
  std::vector<std::string> params;
  std::size_t input_count = 0;
  MatchSpec preconditions;  // input x input atoms only
  std::vector<ConceptId> output_types;
  std::vector<LocalAtom> effects;  // every atom touching an output
  std::vector<RelationAtom> effect_decls;
};

/// Read-only compiled view of an instance. Borrows the ontology.
class Problem {
 public:
  Problem(const Ontology& ontology, std::span<const ServiceDef> repository, const ServiceDef& query);
  explicit Problem(const InstanceBundle& bundle) : Problem(bundle.ontology, bundle.repository, bundle.query) {}

  const Ontology& ontology() const { return *ontology_; }
  const std::vector<CompiledService>& services() const { return services_; }
  std::optional<std::size_t> find_service(std::string_view name) const;

  /// Pseudo-service with no inputs whose outputs are the query inputs.
  const CompiledService& seed() const { return seed_; }

  /// Query inputs followed by query outputs, with every atom touching an output.
  const MatchSpec& goal_spec() const { return goal_spec_; }
  const std::vector<std::string>& goal_params() const { return goal_params_; }
  std::size_t query_input_count() const { return query_inputs_; }

 private:
  const Ontology* ontology_;
  std::vector<CompiledService> services_;
  CompiledService seed_;
  MatchSpec goal_spec_;
  std::vector<std::string> goal_params_;
  std::size_t query_inputs_ = 0;
};

struct EngineConfig {
  std::uint32_t max_sweeps = 10000;
  bool injective = false;
  DedupMode dedup = DedupMode::identity;
  bool apply_rules = true;
  bool prune = true;
  /// Goal bindings tried when pruning; the shortest pruned plan wins.
  std::uint32_t goal_candidates = 8;
  std::string seed_note;
};

/// Id-level record of one executed step, kept next to its name form.
struct StepRecord {
  StepKind kind = StepKind::service;
  std::size_t index = 0;  // service or rule index; unused for the seed
  Binding binding;
  std::vector<ObjectId> produced;       // after deduplication
  std::vector<TripleIndex> added;       // every fact first added by this step
  std::vector<TripleIndex> used;        // facts the preconditions/premise relied on
  Invocation invocation;
};

/// Knowledge, histories and trace of one composition run.
class CompositionState {
 public:
  CompositionState(const Problem& problem, const EngineConfig& config);

  const Knowledge& knowledge() const { return knowledge_; }
  const Problem& problem() const { return *problem_; }
  const std::vector<StepRecord>& trace() const { return trace_; }

  /// Runs the query pseudo-service. Must be the first step.
  const StepRecord& seed();

  std::optional<Binding> find_service_match(std::size_t service) const;
  std::optional<Binding> find_rule_match(std::size_t rule) const;

  /// Empty string if `binding` is callable for the service now, else why not.
  std::string check_service_binding(std::size_t service, const Binding& binding) const;
  std::string check_rule_binding(std::size_t rule, const Binding& binding) const;

  const StepRecord& call_service(std::size_t service, const Binding& binding);
  const StepRecord& apply_rule(std::size_t rule, const Binding& binding);

  /// Applies rules to a fixpoint; returns the number of applications.
  std::size_t apply_inference_rules();

  /// Binding of query inputs then outputs, or none.
  std::optional<Binding> goal_test() const;
  /// Up to `limit` distinct goal bindings, first one equal to goal_test().
  std::vector<Binding> goal_bindings(std::size_t limit) const;

  std::size_t service_calls() const { return service_calls_; }
  std::size_t rule_applications() const { return rule_applications_; }
  /// Step that created an object, and step that first added a fact.
  std::size_t creator(ObjectId id) const { return creator_.at(id.value); }
  std::size_t origin(TripleIndex t) const { return origin_.at(t); }

 private:
  std::vector<TripleIndex> used_facts(std::span<const LocalAtom> atoms, const Binding& binding) const;
  void note_added(std::span<const TripleIndex> added, std::size_t step);
  NamedObject named(const std::string& param, ObjectId id) const;

  const Problem* problem_;
  EngineConfig config_;
  MatchOptions match_options_;
  Knowledge knowledge_;
  std::vector<CallHistory> service_history_;
  std::vector<CallHistory> rule_history_;
  std::vector<std::uint32_t> call_counts_;
  std::vector<StepRecord> trace_;
  std::vector<std::size_t> creator_;
  std::vector<std::size_t> origin_;
  std::size_t service_calls_ = 0;
  std::size_t rule_applications_ = 0;
  bool seeded_ = false;
};

struct SearchReport {
  Verdict verdict = Verdict::unsolvable;
  std::uint64_t sweeps = 0;
  std::uint64_t service_calls = 0;
  std::uint64_t rule_applications = 0;
  std::uint64_t objects = 0;
  std::uint64_t facts = 0;
  double wall_seconds = 0.0;
  std::string seed_note;
};

struct SearchResult {
  SearchReport report;
  std::optional<Composition> composition;
  /// Unpruned trace in name form.
  std::vector<Invocation> trace;
};

SearchResult search_composition(const Problem& problem, const EngineConfig& config = {});

/// Replays a name-form step list in a fresh state (step 0 must be the query)
/// and returns it with canonical object names plus the state's goal binding,
/// or none if some step is not callable or the goal does not hold.
std::optional<Composition> renormalize(const Problem& problem, std::span<const Invocation> steps,
                                       const EngineConfig& config = {});

/// Replays `steps` like renormalize and prunes the result.
std::optional<Composition> prune_steps(const Problem& problem, std::span<const Invocation> steps,
                                       const EngineConfig& config = {});

/// Dependency pruning followed by greedy single-step deletion; the result
/// is renormalized. Falls back to the full trace if a replay fails.
Composition prune_composition(const Problem& problem, const CompositionState& state, const Binding& goal,
                              const EngineConfig& config);

PlanDocument to_plan_document(const SearchResult& result, const EngineConfig& config);

}  // namespace relcompose

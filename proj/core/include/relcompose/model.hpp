#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relcompose/knowledge.hpp"
#include "relcompose/ontology.hpp"

namespace relcompose {

struct ParamSpec {
  std::string name;
  std::string type;

  friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

/// A service, or the user query (which has the same shape: inputs are what is
/// known, outputs what is wanted, atoms are known and required facts).
struct ServiceDef {
  std::string name;
  std::vector<ParamSpec> inputs;
  std::vector<ParamSpec> outputs;
  std::vector<RelationAtom> relations;

  friend bool operator==(const ServiceDef&, const ServiceDef&) = default;
};

struct SourcePaths {
  std::string ontology;
  std::string rules;
  std::string repository;
  std::string query;
};

/// One complete problem: ontology with rules, repository and query.
struct InstanceBundle {
  Ontology ontology;
  std::vector<ServiceDef> repository;
  ServiceDef query;
  SourcePaths sources;
};

enum class StepKind { query, service, rule };

struct NamedObject {
  std::string parameter;
  std::string object;

  friend bool operator==(const NamedObject&, const NamedObject&) = default;
};

struct FactRef {
  std::string relation;
  std::string source;
  std::string target;

  friend bool operator==(const FactRef&, const FactRef&) = default;
};

/// One step of a plan in name form. For services `asserted` lists the
/// declared effect atoms, for rules every conclusion atom, for the query its
/// known facts; facts added by symmetric/transitive closure are not listed.
struct Invocation {
  StepKind kind = StepKind::service;
  std::string name;
  std::vector<NamedObject> binding;
  std::vector<NamedObject> produced;
  std::vector<FactRef> asserted;

  friend bool operator==(const Invocation&, const Invocation&) = default;
};

struct Composition {
  std::vector<Invocation> steps;
  std::vector<NamedObject> goal;

  friend bool operator==(const Composition&, const Composition&) = default;
};

/// Number of service steps, i.e. the reported solution length.
std::size_t service_step_count(const Composition& c);
std::size_t rule_step_count(const Composition& c);

enum class Verdict { composed, unsolvable, budget_exceeded };

const char* to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view s);

const char* to_string(DedupMode m);
std::optional<DedupMode> parse_dedup_mode(std::string_view s);

const char* to_string(StepKind k);

struct PlanStats {
  std::uint64_t sweeps = 0;
  std::uint64_t service_calls = 0;
  std::uint64_t rule_applications = 0;

  friend bool operator==(const PlanStats&, const PlanStats&) = default;
};

/// What plan.txt holds. Wall time is deliberately absent so that the file is
/// reproducible byte for byte; it goes to report.txt.
struct PlanDocument {
  Verdict verdict = Verdict::unsolvable;
  DedupMode dedup = DedupMode::identity;
  std::vector<Invocation> steps;
  std::vector<NamedObject> goal;
  PlanStats stats;

  friend bool operator==(const PlanDocument&, const PlanDocument&) = default;
};

}  // namespace relcompose

#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relcompose/diagnostics.hpp"
#include "relcompose/types.hpp"

namespace relcompose {

/// Named binary relation between two local names (rule variables or service
/// parameters). Self-relations are allowed.
struct RelationAtom {
  std::string relation;
  std::string source;
  std::string target;

  friend bool operator==(const RelationAtom&, const RelationAtom&) = default;
};

/// Premise/conclusion pair over untyped variables. Rules only ever add
/// relations between existing objects.
struct InferenceRule {
  std::string name;
  std::vector<std::string> variables;
  std::vector<RelationAtom> premise;
  std::vector<RelationAtom> conclusion;

  friend bool operator==(const InferenceRule&, const InferenceRule&) = default;
};

struct ConceptDecl {
  std::string name;
  std::optional<std::string> parent;

  friend bool operator==(const ConceptDecl&, const ConceptDecl&) = default;
};

struct RelationTypeDecl {
  std::string name;
  bool transitive = false;
  bool symmetric = false;

  friend bool operator==(const RelationTypeDecl&, const RelationTypeDecl&) = default;
};

/// Unchecked ontology declarations as read from files. May contain cycles,
/// duplicates or dangling references; `validate_ontology` reports them.
struct OntologyDraft {
  std::vector<ConceptDecl> concepts;
  std::vector<RelationTypeDecl> relations;
  std::vector<InferenceRule> rules;

  friend bool operator==(const OntologyDraft&, const OntologyDraft&) = default;
};

struct ConceptInfo {
  std::string name;
  ConceptId parent;  // invalid for the root
  std::vector<ConceptId> children;
  std::uint32_t depth = 0;
};

struct RelationType {
  std::string name;
  bool transitive = false;
  bool symmetric = false;
};

/// An inference rule resolved against the ontology: atom endpoints are
/// variable positions.
struct CompiledRule {
  std::string name;
  std::vector<std::string> variables;
  std::vector<LocalAtom> premise;
  std::vector<LocalAtom> conclusion;
};

/// Concept tree, relation-type table and inference rules.
///
/// Built incrementally through the `add_*` members, each of which checks its
/// own invariants and throws `Error` on violation. Once built it is only read,
/// so one instance can back any number of concurrent composition runs.
class Ontology {
 public:
  static constexpr std::string_view kRootName = "Thing";
  /// Marker class that relation entries subclass in the JSON-LD file.
  static constexpr std::string_view kRelationMarker = "Relation";

  /// Registers a concept under `parent`, or as the root when no parent is
  /// given. Throws on duplicate names, unknown parents and a second root.
  ConceptId add_concept(std::string name, std::optional<std::string_view> parent);

  RelationId add_relation_type(std::string name, bool transitive, bool symmetric);

  /// Throws `OntologyError` if the rule is ill-formed against the relations
  /// declared so far.
  void add_rule(InferenceRule rule);

  /// Builds an ontology from a draft; throws `OntologyError` listing every
  /// problem `validate_ontology` finds.
  static Ontology from_draft(const OntologyDraft& draft);
  OntologyDraft to_draft() const;

  /// The subtree rooted at `concept_name`, itself included.
  std::set<std::string> sub_types(std::string_view concept_name) const;
  std::vector<ConceptId> sub_types(ConceptId id) const;

  bool is_subtype_of(std::string_view a, std::string_view b) const;
  bool is_subtype_of(ConceptId a, ConceptId b) const;

  std::optional<ConceptId> find_concept(std::string_view name) const;
  std::optional<RelationId> find_relation(std::string_view name) const;
  ConceptId concept_id(std::string_view name) const;    // throws if unknown
  RelationId relation_id(std::string_view name) const;  // throws if unknown

  const ConceptInfo& concept_info(ConceptId id) const { return concepts_.at(id.value); }
  const RelationType& relation(RelationId id) const { return relations_.at(id.value); }
  const std::string& concept_name(ConceptId id) const { return concepts_.at(id.value).name; }
  const std::string& relation_name(RelationId id) const { return relations_.at(id.value).name; }

  std::size_t concept_count() const { return concepts_.size(); }
  std::size_t relation_count() const { return relations_.size(); }
  std::optional<ConceptId> root() const;

  const std::vector<CompiledRule>& rules() const { return compiled_rules_; }
  const std::vector<InferenceRule>& rule_decls() const { return rules_; }

  /// Ancestors of `id` from its parent up to the root.
  std::vector<ConceptId> ancestors(ConceptId id) const;

 private:
  std::vector<ConceptInfo> concepts_;
  std::vector<RelationType> relations_;
  std::vector<InferenceRule> rules_;
  std::vector<CompiledRule> compiled_rules_;
  std::unordered_map<std::string, ConceptId> concept_index_;
  std::unordered_map<std::string, RelationId> relation_index_;
};

/// Empty iff the draft describes a valid ontology: unique identifier names,
/// concepts disjoint from relations, a single-rooted acyclic tree, and
/// well-formed rules over declared relations.
std::vector<Diagnostic> validate_ontology(const OntologyDraft& draft);

/// Checks a single rule against a set of declared relation names.
std::vector<Diagnostic> validate_rule(const InferenceRule& rule,
                                      const std::set<std::string, std::less<>>& relation_names,
                                      std::string_view path);

}  // namespace relcompose

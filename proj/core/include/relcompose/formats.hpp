#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "relcompose/diagnostics.hpp"
#include "relcompose/model.hpp"
#include "relcompose/ontology.hpp"

namespace relcompose {

// Instance files. Every parser is total: it returns a value or diagnostics,
// never throws on bad input. `file` only labels diagnostics.

/// JSON-LD `@graph` of classes. Entries whose subclass chain reaches
/// "Relation" become relation types; everything else is a concept under
/// "Thing" by default. The draft always lists "Thing" first and has no rules.
Parsed<OntologyDraft> parse_ontology(std::string_view text, std::string_view file = {});
std::string write_ontology(const OntologyDraft& draft);

Parsed<std::vector<InferenceRule>> parse_rules(std::string_view text, std::string_view file = {});
std::string write_rules(const std::vector<InferenceRule>& rules);

/// `service` elements, each with exactly two `message`s (inputs, outputs)
/// followed by `relation` elements.
Parsed<std::vector<ServiceDef>> parse_repository(std::string_view text, std::string_view file = {});
std::string write_repository(const std::vector<ServiceDef>& services);

/// A single `service` (or `query`) element; zero outputs are allowed.
Parsed<ServiceDef> parse_query(std::string_view text, std::string_view file = {});
std::string write_query(const ServiceDef& query);

Parsed<PlanDocument> read_plan(std::string_view text, std::string_view file = {});
std::string write_plan(const PlanDocument& plan);

/// Resolves every cross-reference and builds the ontology. Unknown names
/// that differ from a declared one only in letter case get a hint.
Parsed<InstanceBundle> link_instance(OntologyDraft ontology, std::vector<InferenceRule> rules,
                                     std::vector<ServiceDef> repository, ServiceDef query,
                                     SourcePaths sources = {});

struct InstanceFiles {
  std::filesystem::path ontology;
  std::filesystem::path rules;
  std::filesystem::path repository;
  std::filesystem::path query;

  /// `ontology.jsonld`, `rules.xml`, `repository.xml`, `query.xml` in `dir`.
  static InstanceFiles in_directory(const std::filesystem::path& dir);
};

Parsed<InstanceBundle> load_instance(const InstanceFiles& files);

/// Whole-file read; diagnostics if it cannot be opened.
Parsed<std::string> read_text_file(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace relcompose

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "relcompose/model.hpp"
#include "relcompose/ontology.hpp"

namespace relcompose {

/// Layered random instance. Stage 1 objects are the query inputs; each of the
/// `stages - 1` layers holds `services_per_layer` services that turn objects
/// of earlier stages into objects of the next one. Every stage has its own
/// concept subtree, which keeps the instance acyclic and the search finite.
struct GenConfig {
  std::uint64_t seed = 1;
  std::uint32_t stages = 3;
  std::uint32_t objects_per_stage = 4;
  std::uint32_t relations_per_stage = 3;
  std::uint32_t services_per_layer = 3;
  std::uint32_t params_min = 1;
  std::uint32_t params_max = 3;
  std::uint32_t concept_count = 6;  // per stage subtree, its root included
  std::uint32_t hierarchy_depth = 3;
  std::uint32_t relation_type_count = 4;
  std::uint32_t rule_count = 2;
  std::uint32_t noise_services = 6;
  std::uint32_t noise_concepts = 4;
  std::uint32_t query_outputs = 2;
  /// No relations, rules or relation atoms at all.
  bool hierarchy_only = false;
  /// For every service carrying a rule chain, add a permit service and a
  /// copy of it that asserts the derived facts directly. Solutions that
  /// ignore rules then exist but need one extra call per chain.
  bool rule_detours = true;
};

/// Reasons the configuration cannot be generated; empty if it can.
std::vector<std::string> check_config(const GenConfig& config);

struct GeneratedInstance {
  OntologyDraft ontology;  // rules included
  std::vector<ServiceDef> repository;
  ServiceDef query;
  /// Every step the generator executed while building the instance.
  std::vector<Invocation> witness;
  /// The witness pruned and renormalized.
  Composition reference;
};

/// Deterministic in the configuration. Throws Error if check_config fails.
GeneratedInstance generate_instance(const GenConfig& config);

/// Links the generated files into a bundle; throws Error on diagnostics.
InstanceBundle to_bundle(const GeneratedInstance& instance);

/// File name to contents: ontology.jsonld, rules.xml, repository.xml,
/// query.xml, solution.reference.txt and generator.txt (configuration and
/// random algorithm).
std::map<std::string, std::string> render_instance(const GeneratedInstance& instance, const GenConfig& config);

std::string describe_config(const GenConfig& config);

/// Presets sized like the published experiments: four relational instances
/// with rules (rows 0-3) and three hierarchy-only ones (rows 0-2).
GenConfig relational_preset(int row, std::uint64_t seed);
GenConfig hierarchy_preset(int row, std::uint64_t seed);
inline constexpr int kRelationalPresets = 4;
inline constexpr int kHierarchyPresets = 3;

}  // namespace relcompose

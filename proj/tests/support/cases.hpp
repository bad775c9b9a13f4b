#pragma once

// Random inputs shared by the unit and acceptance tests.

#include <filesystem>
#include <memory>

#include "relcompose/knowledge.hpp"
#include "relcompose/matcher.hpp"
#include "relcompose/model.hpp"
#include "relcompose/random.hpp"

namespace relcompose::cases {

std::filesystem::path data_dir();
InstanceBundle motivating_bundle();

/// Knowledge with at most 8 objects, a spec of arity at most 4 with at most
/// 5 atoms, and a history holding some of its matches.
struct MatcherCase {
  std::unique_ptr<Ontology> ontology;
  std::unique_ptr<Knowledge> knowledge;
  MatchSpec spec;
  CallHistory history;
  bool injective = false;
};
MatcherCase random_matcher_case(Rng& rng);

/// Relation types with random flags and a list of edges to insert.
struct GraphCase {
  std::unique_ptr<Ontology> ontology;
  std::size_t objects = 0;
  std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> inserts;
};
GraphCase random_graph_case(Rng& rng, std::size_t max_objects);

/// At most 4 services, 3 concepts and 2 relation types. Concept parents
/// always have a larger index and outputs are of a larger concept index
/// than any input, so every instance has a finite search space.
InstanceBundle random_tiny_instance(Rng& rng);

}  // namespace relcompose::cases

#include "cases.hpp"

#include <algorithm>

#include "relcompose/formats.hpp"

namespace relcompose::cases {

std::filesystem::path data_dir() { return RELCOMPOSE_DATA_DIR; }

InstanceBundle motivating_bundle() {
  auto loaded = load_instance(InstanceFiles::in_directory(data_dir() / "motivating"));
  if (!loaded.value) throw Error("motivating fixture does not load");
  return std::move(*loaded.value);
}

namespace {

std::unique_ptr<Ontology> random_ontology(Rng& rng, std::size_t concepts, std::size_t relations) {
  auto onto = std::make_unique<Ontology>();
  onto->add_concept("Thing", std::nullopt);
  // Parents come first here, so build from the highest index down.
  for (std::size_t i = concepts; i-- > 0;) {
    std::string parent = "Thing";
    if (i + 1 < concepts && rng.chance(0.4)) parent = "C" + std::to_string(rng.between(i + 1, concepts - 1));
    onto->add_concept("C" + std::to_string(i), parent);
  }
  for (std::size_t r = 0; r < relations; ++r) {
    onto->add_relation_type("r" + std::to_string(r), rng.chance(0.3), rng.chance(0.3));
  }
  return onto;
}

}  // namespace

MatcherCase random_matcher_case(Rng& rng) {
  MatcherCase c;
  const auto concepts = static_cast<std::size_t>(rng.between(1, 4));
  const auto relations = static_cast<std::size_t>(rng.between(1, 3));
  c.ontology = random_ontology(rng, concepts, relations);
  c.knowledge = std::make_unique<Knowledge>(*c.ontology);
  auto& kb = *c.knowledge;
  const auto n = rng.between(0, 8);
  for (std::int64_t i = 0; i < n; ++i) {
    kb.add_object(ConceptId(static_cast<std::uint32_t>(1 + rng.below(concepts))), Provenance{"gen", "o", static_cast<std::uint32_t>(i)});
  }
  if (n > 0) {
    const auto facts = rng.between(0, 12);
    for (std::int64_t i = 0; i < facts; ++i) {
      kb.add_relation(RelationId(static_cast<std::uint32_t>(rng.below(relations))),
                      ObjectId(static_cast<std::uint32_t>(rng.below(n))), ObjectId(static_cast<std::uint32_t>(rng.below(n))));
    }
  }
  const auto arity = static_cast<std::size_t>(rng.between(0, 4));
  for (std::size_t i = 0; i < arity; ++i) {
    if (rng.chance(0.15)) {
      c.spec.types.push_back(std::nullopt);
    } else {
      c.spec.types.push_back(ConceptId(static_cast<std::uint32_t>(rng.below(concepts + 1))));
    }
  }
  if (arity > 0) {
    const auto atoms = rng.between(0, 5);
    for (std::int64_t i = 0; i < atoms; ++i) {
      c.spec.atoms.push_back(LocalAtom{RelationId(static_cast<std::uint32_t>(rng.below(relations))),
                                       static_cast<std::uint32_t>(rng.below(arity)),
                                       static_cast<std::uint32_t>(rng.below(arity))});
    }
  }
  c.injective = rng.chance(0.3);
  // A few random tuples in the history; whether they match does not matter.
  const auto recorded = rng.between(0, 3);
  for (std::int64_t i = 0; i < recorded && n > 0; ++i) {
    Binding b;
    for (std::size_t k = 0; k < arity; ++k) b.push_back(ObjectId(static_cast<std::uint32_t>(rng.below(n))));
    c.history.record(b);
  }
  return c;
}

GraphCase random_graph_case(Rng& rng, std::size_t max_objects) {
  GraphCase g;
  const auto relations = static_cast<std::size_t>(rng.between(1, 3));
  g.ontology = random_ontology(rng, 1, relations);
  g.objects = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_objects)));
  const auto edges = rng.between(0, static_cast<std::int64_t>(2 * g.objects));
  for (std::int64_t i = 0; i < edges; ++i) {
    g.inserts.emplace_back(static_cast<std::uint32_t>(rng.below(relations)), static_cast<std::uint32_t>(rng.below(g.objects)),
                           static_cast<std::uint32_t>(rng.below(g.objects)));
  }
  return g;
}

InstanceBundle random_tiny_instance(Rng& rng) {
  const auto concepts = static_cast<std::size_t>(rng.between(2, 3));
  const auto relations = static_cast<std::size_t>(rng.between(0, 2));
  OntologyDraft draft;
  draft.concepts.push_back({"Thing", std::nullopt});
  for (std::size_t i = concepts; i-- > 0;) {
    std::string parent = "Thing";
    if (i + 1 < concepts && rng.chance(0.4)) parent = "C" + std::to_string(rng.between(i + 1, concepts - 1));
    draft.concepts.push_back({"C" + std::to_string(i), parent});
  }
  for (std::size_t r = 0; r < relations; ++r) draft.relations.push_back({"r" + std::to_string(r), rng.chance(0.3), rng.chance(0.3)});
  std::vector<InferenceRule> rules;
  auto rel = [&] { return "r" + std::to_string(rng.below(relations)); };
  if (relations > 0 && rng.chance(0.3)) {
    rules.push_back({"rule0", {"X", "Y", "Z"}, {{rel(), "X", "Y"}, {rel(), "Y", "Z"}}, {{rel(), "X", "Z"}}});
  }
  auto concept_name = [](std::size_t i) { return "C" + std::to_string(i); };

  std::vector<ServiceDef> repo;
  const auto services = rng.between(1, 4);
  for (std::int64_t s = 0; s < services; ++s) {
    ServiceDef svc;
    svc.name = "s" + std::to_string(s);
    std::size_t top = 0;
    const auto n_in = rng.between(1, 2);
    for (std::int64_t i = 0; i < n_in; ++i) {
      const auto c = rng.below(concepts);
      top = std::max<std::size_t>(top, c);
      svc.inputs.push_back({"i" + std::to_string(i), concept_name(c)});
    }
    if (top + 1 >= concepts) {
      // Nothing above it: the service takes the lowest concept instead.
      for (auto& p : svc.inputs) p.type = concept_name(0);
      top = 0;
    }
    const auto n_out = rng.between(1, 2);
    for (std::int64_t i = 0; i < n_out; ++i) {
      svc.outputs.push_back({"o" + std::to_string(i), concept_name(top + 1 + rng.below(concepts - top - 1))});
    }
    if (relations > 0) {
      if (svc.inputs.size() == 2 && rng.chance(0.4)) svc.relations.push_back({rel(), "i0", "i1"});
      const auto effects = rng.between(0, 2);
      for (std::int64_t e = 0; e < effects; ++e) {
        const auto& o = svc.outputs[rng.below(svc.outputs.size())].name;
        const auto& other = svc.inputs[rng.below(svc.inputs.size())].name;
        svc.relations.push_back(rng.chance(0.5) ? RelationAtom{rel(), o, other} : RelationAtom{rel(), other, o});
      }
    }
    repo.push_back(std::move(svc));
  }

  ServiceDef query;
  query.name = "query";
  const auto n_in = rng.between(1, 2);
  for (std::int64_t i = 0; i < n_in; ++i) query.inputs.push_back({"in" + std::to_string(i), concept_name(rng.below(concepts))});
  const auto n_out = rng.between(1, 2);
  for (std::int64_t i = 0; i < n_out; ++i) query.outputs.push_back({"out" + std::to_string(i), concept_name(rng.below(concepts))});
  if (relations > 0) {
    if (query.inputs.size() == 2 && rng.chance(0.5)) query.relations.push_back({rel(), "in0", "in1"});
    const auto required = rng.between(0, 2);
    for (std::int64_t k = 0; k < required; ++k) {
      const auto& o = query.outputs[rng.below(query.outputs.size())].name;
      const auto& other = query.inputs[rng.below(query.inputs.size())].name;
      query.relations.push_back(rng.chance(0.5) ? RelationAtom{rel(), o, other} : RelationAtom{rel(), other, o});
    }
  }

  auto linked = link_instance(std::move(draft), std::move(rules), std::move(repo), std::move(query));
  if (!linked.value) throw Error("tiny instance does not link");
  return std::move(*linked.value);
}

}  // namespace relcompose::cases

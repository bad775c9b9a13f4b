#include "relcompose/ontology.hpp"

#include <algorithm>
#include <map>

namespace relcompose {

namespace {

Diagnostic error_at(std::string path, std::string message) {
  return Diagnostic{Severity::error, {}, std::move(path), std::move(message)};
}

std::string concept_path(std::string_view name) { return "concept[" + std::string(name) + "]"; }
std::string relation_path(std::string_view name) { return "relation[" + std::string(name) + "]"; }

}  // namespace

ConceptId Ontology::add_concept(std::string name, std::optional<std::string_view> parent) {
  if (!is_identifier(name)) throw Error("invalid concept name '" + name + "'");
  if (name == kRelationMarker) throw Error("'Relation' is reserved and cannot name a concept");
  if (concept_index_.contains(name)) throw Error("duplicate concept '" + name + "'");
  if (relation_index_.contains(name)) throw Error("concept '" + name + "' clashes with a relation name");

  ConceptInfo info;
  info.name = name;
  if (parent) {
    auto p = find_concept(*parent);
    if (!p) throw Error("unknown parent concept '" + std::string(*parent) + "' for '" + name + "'");
    info.parent = *p;
    info.depth = concepts_[p->value].depth + 1;
  } else if (root()) {
    throw Error("second root concept '" + name + "' (root is '" + concepts_[root()->value].name + "')");
  }

  ConceptId id(static_cast<std::uint32_t>(concepts_.size()));
  if (info.parent.valid()) concepts_[info.parent.value].children.push_back(id);
  concepts_.push_back(std::move(info));
  concept_index_.emplace(std::move(name), id);
  return id;
}

RelationId Ontology::add_relation_type(std::string name, bool transitive, bool symmetric) {
  if (!is_identifier(name)) throw Error("invalid relation name '" + name + "'");
  if (relation_index_.contains(name)) throw Error("duplicate relation '" + name + "'");
  if (concept_index_.contains(name) || name == kRootName || name == kRelationMarker) {
    throw Error("relation '" + name + "' clashes with a concept name");
  }
  RelationId id(static_cast<std::uint32_t>(relations_.size()));
  relations_.push_back(RelationType{name, transitive, symmetric});
  relation_index_.emplace(std::move(name), id);
  return id;
}

void Ontology::add_rule(InferenceRule rule) {
  std::set<std::string, std::less<>> names;
  for (const auto& r : relations_) names.insert(r.name);
  auto diagnostics = validate_rule(rule, names, "rule[" + rule.name + "]");
  for (const auto& existing : rules_) {
    if (existing.name == rule.name) {
      diagnostics.push_back(error_at("rule[" + rule.name + "]", "duplicate rule name"));
    }
  }
  if (has_errors(diagnostics)) throw OntologyError(std::move(diagnostics));

  std::unordered_map<std::string, std::uint32_t> var_index;
  for (std::uint32_t i = 0; i < rule.variables.size(); ++i) var_index.emplace(rule.variables[i], i);
  auto compile = [&](const RelationAtom& a) {
    return LocalAtom{relation_id(a.relation), var_index.at(a.source), var_index.at(a.target)};
  };

  CompiledRule compiled;
  compiled.name = rule.name;
  compiled.variables = rule.variables;
  for (const auto& a : rule.premise) compiled.premise.push_back(compile(a));
  for (const auto& a : rule.conclusion) compiled.conclusion.push_back(compile(a));
  compiled_rules_.push_back(std::move(compiled));
  rules_.push_back(std::move(rule));
}

Ontology Ontology::from_draft(const OntologyDraft& draft) {
  auto diagnostics = validate_ontology(draft);
  if (has_errors(diagnostics)) throw OntologyError(std::move(diagnostics));

  Ontology onto;
  // Parents may be declared after their children; insert breadth-first from the root.
  std::multimap<std::string, const ConceptDecl*> by_parent;
  const ConceptDecl* root_decl = nullptr;
  for (const auto& c : draft.concepts) {
    if (c.parent) {
      by_parent.emplace(*c.parent, &c);
    } else {
      root_decl = &c;
    }
  }
  if (root_decl) {
    std::vector<const ConceptDecl*> queue{root_decl};
    onto.add_concept(root_decl->name, std::nullopt);
    for (std::size_t i = 0; i < queue.size(); ++i) {
      auto [lo, hi] = by_parent.equal_range(queue[i]->name);
      for (auto it = lo; it != hi; ++it) {
        onto.add_concept(it->second->name, *it->second->parent);
        queue.push_back(it->second);
      }
    }
  }
  for (const auto& r : draft.relations) onto.add_relation_type(r.name, r.transitive, r.symmetric);
  for (const auto& rule : draft.rules) onto.add_rule(rule);
  return onto;
}

OntologyDraft Ontology::to_draft() const {
  OntologyDraft d;
  for (const auto& c : concepts_) {
    ConceptDecl decl{c.name, std::nullopt};
    if (c.parent.valid()) decl.parent = concepts_[c.parent.value].name;
    d.concepts.push_back(std::move(decl));
  }
  for (const auto& r : relations_) d.relations.push_back({r.name, r.transitive, r.symmetric});
  d.rules = rules_;
  return d;
}

std::set<std::string> Ontology::sub_types(std::string_view concept_name) const {
  std::set<std::string> out;
  for (ConceptId id : sub_types(concept_id(concept_name))) out.insert(concepts_[id.value].name);
  return out;
}

std::vector<ConceptId> Ontology::sub_types(ConceptId id) const {
  std::vector<ConceptId> out{id};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& kids = concepts_.at(out[i].value).children;
    out.insert(out.end(), kids.begin(), kids.end());
  }
  return out;
}

bool Ontology::is_subtype_of(std::string_view a, std::string_view b) const {
  return is_subtype_of(concept_id(a), concept_id(b));
}

bool Ontology::is_subtype_of(ConceptId a, ConceptId b) const {
  const auto target_depth = concepts_.at(b.value).depth;
  while (a.valid()) {
    const auto& info = concepts_[a.value];
    if (a == b) return true;
    if (info.depth <= target_depth) return false;
    a = info.parent;
  }
  return false;
}

std::optional<ConceptId> Ontology::find_concept(std::string_view name) const {
  auto it = concept_index_.find(std::string(name));
  if (it == concept_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> Ontology::find_relation(std::string_view name) const {
  auto it = relation_index_.find(std::string(name));
  if (it == relation_index_.end()) return std::nullopt;
  return it->second;
}

ConceptId Ontology::concept_id(std::string_view name) const {
  if (auto id = find_concept(name)) return *id;
  throw Error("unknown concept '" + std::string(name) + "'");
}

RelationId Ontology::relation_id(std::string_view name) const {
  if (auto id = find_relation(name)) return *id;
  throw Error("unknown relation '" + std::string(name) + "'");
}

std::optional<ConceptId> Ontology::root() const {
  if (concepts_.empty()) return std::nullopt;
  return ConceptId(0);
}

std::vector<ConceptId> Ontology::ancestors(ConceptId id) const {
  std::vector<ConceptId> out;
  for (ConceptId p = concepts_.at(id.value).parent; p.valid(); p = concepts_[p.value].parent) {
    out.push_back(p);
  }
  return out;
}

std::vector<Diagnostic> validate_rule(const InferenceRule& rule,
                                      const std::set<std::string, std::less<>>& relation_names,
                                      std::string_view path) {
  std::vector<Diagnostic> out;
  const std::string base(path);
  if (!is_identifier(rule.name)) out.push_back(error_at(base, "invalid rule name '" + rule.name + "'"));

  std::set<std::string, std::less<>> vars;
  for (const auto& v : rule.variables) {
    if (!is_identifier(v)) out.push_back(error_at(base, "invalid variable name '" + v + "'"));
    if (!vars.insert(v).second) out.push_back(error_at(base, "duplicate variable '" + v + "'"));
  }

  auto check_atoms = [&](const std::vector<RelationAtom>& atoms, std::string_view section) {
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const auto& a = atoms[i];
      const std::string p = base + "/" + std::string(section) + "[" + std::to_string(i + 1) + "]";
      if (!relation_names.contains(a.relation)) {
        out.push_back(error_at(p, "unknown relation '" + a.relation + "'"));
      }
      for (const auto* end : {&a.source, &a.target}) {
        if (!vars.contains(*end)) out.push_back(error_at(p, "endpoint '" + *end + "' is not a declared variable"));
      }
    }
  };
  check_atoms(rule.premise, "premise");
  check_atoms(rule.conclusion, "conclusion");

  if (rule.conclusion.empty()) {
    out.push_back(error_at(base, "rule has an empty conclusion and produces nothing"));
  } else if (std::all_of(rule.conclusion.begin(), rule.conclusion.end(), [&](const RelationAtom& c) {
               return std::find(rule.premise.begin(), rule.premise.end(), c) != rule.premise.end();
             })) {
    out.push_back(error_at(base, "every conclusion atom already appears in the premise"));
  }

  std::set<std::string, std::less<>> bound;
  for (const auto& a : rule.premise) {
    bound.insert(a.source);
    bound.insert(a.target);
  }
  for (const auto& a : rule.conclusion) {
    for (const auto* end : {&a.source, &a.target}) {
      if (vars.contains(*end) && !bound.contains(*end)) {
        out.push_back(error_at(base, "conclusion variable '" + *end + "' does not occur in the premise"));
      }
    }
  }
  return out;
}

std::vector<Diagnostic> validate_ontology(const OntologyDraft& draft) {
  std::vector<Diagnostic> out;

  std::map<std::string, const ConceptDecl*, std::less<>> concepts;
  std::vector<const ConceptDecl*> roots;
  for (const auto& c : draft.concepts) {
    const auto p = concept_path(c.name);
    if (!is_identifier(c.name)) out.push_back(error_at(p, "invalid concept name"));
    if (c.name == Ontology::kRelationMarker) out.push_back(error_at(p, "'Relation' is reserved"));
    if (!concepts.emplace(c.name, &c).second) out.push_back(error_at(p, "duplicate concept"));
    if (!c.parent) roots.push_back(&c);
  }
  if (roots.size() > 1) {
    for (std::size_t i = 1; i < roots.size(); ++i) {
      out.push_back(error_at(concept_path(roots[i]->name),
                             "second root concept (root is '" + roots[0]->name + "')"));
    }
  } else if (roots.empty() && !draft.concepts.empty()) {
    out.push_back(error_at("concepts", "no root concept"));
  }

  for (const auto& c : draft.concepts) {
    if (c.parent && !concepts.contains(*c.parent)) {
      out.push_back(error_at(concept_path(c.name), "unknown parent concept '" + *c.parent + "'"));
    }
  }

  // Cycle detection: walk parent links; each cycle is reported once.
  std::map<std::string, int, std::less<>> state;  // 1 = on current walk, 2 = done
  for (const auto& c : draft.concepts) {
    if (state[c.name] == 2) continue;
    std::vector<std::string> walk;
    const ConceptDecl* cur = &c;
    while (cur && state[cur->name] == 0) {
      state[cur->name] = 1;
      walk.push_back(cur->name);
      if (!cur->parent) {
        cur = nullptr;
        break;
      }
      auto it = concepts.find(*cur->parent);
      cur = it == concepts.end() ? nullptr : it->second;
    }
    if (cur && state[cur->name] == 1) {
      auto start = std::find(walk.begin(), walk.end(), cur->name);
      std::string members;
      for (auto it = start; it != walk.end(); ++it) members += (members.empty() ? "" : " -> ") + *it;
      out.push_back(error_at(concept_path(cur->name), "cyclic parent chain: " + members + " -> " + cur->name));
    }
    for (const auto& n : walk) state[n] = 2;
  }

  std::set<std::string, std::less<>> relation_names;
  for (const auto& r : draft.relations) {
    const auto p = relation_path(r.name);
    if (!is_identifier(r.name)) out.push_back(error_at(p, "invalid relation name"));
    if (!relation_names.insert(r.name).second) out.push_back(error_at(p, "duplicate relation"));
    if (concepts.contains(r.name) || r.name == Ontology::kRootName || r.name == Ontology::kRelationMarker) {
      out.push_back(error_at(p, "relation name clashes with a concept name"));
    }
  }

  std::set<std::string, std::less<>> rule_names;
  for (const auto& rule : draft.rules) {
    const auto p = "rule[" + rule.name + "]";
    if (!rule_names.insert(rule.name).second) out.push_back(error_at(p, "duplicate rule name"));
    auto more = validate_rule(rule, relation_names, p);
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

}  // namespace relcompose

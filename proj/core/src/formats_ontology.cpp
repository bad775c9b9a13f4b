#include <map>
#include <set>

#include <json.hpp>

#include "relcompose/formats.hpp"
#include "xml_reader.hpp"

namespace relcompose {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct Entry {
  std::string id;
  std::string parent;  // empty: default to the root
  std::optional<bool> transitive;
  std::optional<bool> symmetric;
  std::string path;
};

}  // namespace

Parsed<OntologyDraft> parse_ontology(std::string_view text, std::string_view file) {
  Parsed<OntologyDraft> out;
  auto& diags = out.diagnostics;
  auto error = [&](std::string path, std::string msg) {
    diags.push_back(Diagnostic{Severity::error, std::string(file), std::move(path), std::move(msg)});
  };
  auto warn = [&](std::string path, std::string msg) {
    diags.push_back(Diagnostic{Severity::warning, std::string(file), std::move(path), std::move(msg)});
  };

  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    error({}, std::string("malformed JSON: ") + e.what());
    return out;
  }
  if (!doc.is_object() || !doc.contains("@graph") || !doc["@graph"].is_array()) {
    error({}, "expected an object with an \"@graph\" array");
    return out;
  }

  const std::string root(Ontology::kRootName);
  const std::string marker(Ontology::kRelationMarker);
  std::vector<Entry> entries;
  std::map<std::string, std::size_t> by_id;
  const auto& graph = doc["@graph"];
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const auto& node = graph[i];
    const std::string path = "@graph[" + std::to_string(i + 1) + "]";
    if (!node.is_object()) {
      error(path, "graph entry is not an object");
      continue;
    }
    if (!node.contains("@id") || !node["@id"].is_string()) {
      error(path, "missing string \"@id\"");
      continue;
    }
    Entry e;
    e.id = detail::local_name(node["@id"].get<std::string>());
    e.path = path + "{" + e.id + "}";

    for (const auto& [key, value] : node.items()) {
      const auto local = detail::local_name(key);
      if (key == "@id" || key == "@type") continue;
      if (local == "subClassOf") {
        if (value.is_string()) {
          e.parent = detail::local_name(value.get<std::string>());
        } else if (value.is_object() && value.contains("@id") && value["@id"].is_string()) {
          e.parent = detail::local_name(value["@id"].get<std::string>());
        } else {
          error(e.path, "\"" + key + "\" must be a string or {\"@id\": ...}");
        }
      } else if (local == "isTransitive" || local == "isSymetric" || local == "isSymmetric") {
        if (!value.is_boolean()) {
          error(e.path, "\"" + key + "\" must be a boolean");
          continue;
        }
        const bool v = value.get<bool>();
        auto& slot = local == "isTransitive" ? e.transitive : e.symmetric;
        if (slot && *slot != v) {
          error(e.path, "isSymetric and isSymmetric disagree");
        } else {
          slot = v;
        }
      } else if (key.empty() || (key[0] != '@' && key.find(':') == std::string::npos)) {
        warn(e.path, "ignoring unknown key \"" + key + "\"");
      }
    }

    if (e.id == marker) continue;
    if (e.id == root) {
      if (!e.parent.empty()) error(e.path, "the root concept cannot have a parent");
      continue;
    }
    if (by_id.contains(e.id)) {
      error(e.path, "duplicate @id '" + e.id + "'");
      continue;
    }
    by_id.emplace(e.id, entries.size());
    entries.push_back(std::move(e));
  }

  // Classify by walking subclass links: reaching the marker makes a relation.
  std::vector<int> kind(entries.size(), -1);  // 0 concept, 1 relation
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::set<std::size_t> walk;
    std::size_t cur = i;
    int k = -1;
    while (k < 0) {
      if (kind[cur] >= 0) {
        k = kind[cur];
        break;
      }
      const auto& p = entries[cur].parent;
      if (p.empty() || p == root) {
        k = 0;
      } else if (p == marker) {
        k = 1;
      } else if (auto it = by_id.find(p); it == by_id.end()) {
        error(entries[cur].path, "unknown subclass target '" + p + "'");
        k = 0;
      } else if (!walk.insert(cur).second || it->second == cur) {
        k = 0;  // cycle; reported by ontology validation
      } else {
        cur = it->second;
      }
    }
    kind[i] = k;
  }

  OntologyDraft draft;
  draft.concepts.push_back(ConceptDecl{root, std::nullopt});
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (kind[i] == 1) {
      draft.relations.push_back(RelationTypeDecl{e.id, e.transitive.value_or(false), e.symmetric.value_or(false)});
    } else {
      if (e.transitive || e.symmetric) warn(e.path, "relation flags on a concept are ignored");
      if (by_id.contains(e.parent) && kind[by_id.at(e.parent)] == 1) {
        error(e.path, "concept '" + e.id + "' subclasses relation '" + e.parent + "'");
      }
      draft.concepts.push_back(ConceptDecl{e.id, e.parent.empty() ? root : e.parent});
    }
  }
  for (auto& d : validate_ontology(draft)) {
    d.file = std::string(file);
    diags.push_back(std::move(d));
  }
  if (!has_errors(diags)) out.value = std::move(draft);
  return out;
}

std::string write_ontology(const OntologyDraft& draft) {
  ordered_json graph = ordered_json::array();
  for (const auto& c : draft.concepts) {
    if (!c.parent) continue;
    ordered_json e;
    e["@id"] = c.name;
    e["@type"] = "rdfs:Class";
    e["rdfs:subClassOf"] = ordered_json{{"@id", *c.parent}};
    graph.push_back(std::move(e));
  }
  for (const auto& r : draft.relations) {
    ordered_json e;
    e["@id"] = r.name;
    e["@type"] = "rdfs:Class";
    e["rdfs:subClassOf"] = ordered_json{{"@id", std::string(Ontology::kRelationMarker)}};
    e["isTransitive"] = r.transitive;
    e["isSymetric"] = r.symmetric;
    graph.push_back(std::move(e));
  }
  ordered_json doc;
  doc["@graph"] = std::move(graph);
  return doc.dump(2) + "\n";
}

}  // namespace relcompose

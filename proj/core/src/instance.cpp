#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "relcompose/formats.hpp"

namespace relcompose {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::string hint(std::string_view name, const std::vector<std::string>& known) {
  for (const auto& k : known) {
    if (iequals(k, name)) return " (did you mean '" + k + "'?)";
  }
  return {};
}

class Linker {
 public:
  explicit Linker(const OntologyDraft& draft) {
    for (const auto& c : draft.concepts) concepts_.push_back(c.name);
    for (const auto& r : draft.relations) relations_.push_back(r.name);
  }

  void error(const std::string& file, std::string path, std::string msg) {
    diags.push_back(Diagnostic{Severity::error, file, std::move(path), std::move(msg)});
  }

  bool has_concept(const std::string& n) const {
    return std::find(concepts_.begin(), concepts_.end(), n) != concepts_.end();
  }
  bool has_relation(const std::string& n) const {
    return std::find(relations_.begin(), relations_.end(), n) != relations_.end();
  }

  void check_service(const ServiceDef& s, const std::string& file, const std::string& base, bool is_query) {
    if (!is_identifier(s.name)) error(file, base, "invalid service name '" + s.name + "'");
    std::set<std::string> names;
    auto params = [&](const std::vector<ParamSpec>& list, std::string_view what) {
      for (const auto& p : list) {
        const auto path = base + "/" + std::string(what) + "[" + p.name + "]";
        if (!is_identifier(p.name)) error(file, path, "invalid parameter name '" + p.name + "'");
        if (!names.insert(p.name).second) {
          error(file, path, "parameter '" + p.name + "' appears more than once (inputs and outputs must be disjoint)");
        }
        if (!has_concept(p.type)) error(file, path, "unknown concept '" + p.type + "'" + hint(p.type, concepts_));
      }
    };
    params(s.inputs, "input");
    params(s.outputs, "output");
    if (!is_query && s.outputs.empty()) error(file, base, "service has no output parameter");
    for (std::size_t i = 0; i < s.relations.size(); ++i) {
      const auto& a = s.relations[i];
      const auto path = base + "/relation[" + std::to_string(i + 1) + "]";
      if (!has_relation(a.relation)) {
        error(file, path, "unknown relation '" + a.relation + "'" + hint(a.relation, relations_));
      }
      for (const auto* end : {&a.source, &a.target}) {
        if (!names.contains(*end)) error(file, path, "endpoint '" + *end + "' is not a parameter");
      }
    }
  }

  std::vector<Diagnostic> diags;

 private:
  std::vector<std::string> concepts_;
  std::vector<std::string> relations_;
};

}  // namespace

Parsed<InstanceBundle> link_instance(OntologyDraft ontology, std::vector<InferenceRule> rules,
                                     std::vector<ServiceDef> repository, ServiceDef query, SourcePaths sources) {
  Parsed<InstanceBundle> out;
  ontology.rules = std::move(rules);
  Linker link(ontology);

  for (auto d : validate_ontology(ontology)) {
    d.file = d.path.rfind("rule[", 0) == 0 ? sources.rules : sources.ontology;
    if (d.message.rfind("unknown relation '", 0) == 0) {
      const auto name = d.message.substr(18, d.message.size() - 19);
      std::vector<std::string> known;
      for (const auto& r : ontology.relations) known.push_back(r.name);
      d.message += hint(name, known);
    }
    link.diags.push_back(std::move(d));
  }

  std::set<std::string> service_names;
  for (std::size_t i = 0; i < repository.size(); ++i) {
    const auto& s = repository[i];
    const auto base = "service[" + std::to_string(i + 1) + "]{" + s.name + "}";
    if (!service_names.insert(s.name).second) link.error(sources.repository, base, "duplicate service name");
    if (s.name == "query") link.error(sources.repository, base, "'query' is reserved for the user request");
    link.check_service(s, sources.repository, base, false);
  }
  link.check_service(query, sources.query, "query", true);

  out.diagnostics = std::move(link.diags);
  if (has_errors(out.diagnostics)) return out;
  try {
    InstanceBundle bundle{Ontology::from_draft(ontology), std::move(repository), std::move(query), std::move(sources)};
    out.value = std::move(bundle);
  } catch (const OntologyError& e) {
    out.diagnostics.insert(out.diagnostics.end(), e.diagnostics().begin(), e.diagnostics().end());
  } catch (const Error& e) {
    out.diagnostics.push_back(Diagnostic{Severity::error, sources.ontology, {}, e.what()});
  }
  return out;
}

InstanceFiles InstanceFiles::in_directory(const std::filesystem::path& dir) {
  return InstanceFiles{dir / "ontology.jsonld", dir / "rules.xml", dir / "repository.xml", dir / "query.xml"};
}

Parsed<std::string> read_text_file(const std::filesystem::path& path) {
  Parsed<std::string> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    out.diagnostics.push_back(Diagnostic{Severity::error, path.string(), {}, "cannot open file"});
    return out;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  out.value = ss.str();
  return out;
}

Parsed<InstanceBundle> load_instance(const InstanceFiles& files) {
  Parsed<InstanceBundle> out;
  auto& diags = out.diagnostics;
  auto take = [&](auto&& parsed) {
    diags.insert(diags.end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
    return std::move(parsed.value);
  };
  auto text = [&](const std::filesystem::path& p) { return take(read_text_file(p)); };

  SourcePaths sources{files.ontology.string(), files.rules.string(), files.repository.string(), files.query.string()};
  auto onto_text = text(files.ontology);
  auto rules_text = text(files.rules);
  auto repo_text = text(files.repository);
  auto query_text = text(files.query);
  if (has_errors(diags)) return out;

  auto draft = take(parse_ontology(*onto_text, sources.ontology));
  auto rules = take(parse_rules(*rules_text, sources.rules));
  auto repo = take(parse_repository(*repo_text, sources.repository));
  auto query = take(parse_query(*query_text, sources.query));
  if (has_errors(diags) || !draft || !rules || !repo || !query) return out;

  auto linked = link_instance(std::move(*draft), std::move(*rules), std::move(*repo), std::move(*query), sources);
  diags.insert(diags.end(), linked.diagnostics.begin(), linked.diagnostics.end());
  out.value = std::move(linked.value);
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write '" + tmp.string() + "'");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace relcompose

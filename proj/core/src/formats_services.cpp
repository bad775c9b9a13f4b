#include <set>

#include "relcompose/formats.hpp"
#include "xml_reader.hpp"

namespace relcompose {

namespace {

using detail::XmlElement;

constexpr std::string_view kGeneratedComment = "<!-- generated by relcompose -->";

class Reader {
 public:
  explicit Reader(std::string_view file) : file_(file) {}

  void error(const XmlElement& e, std::string msg) {
    diags.push_back(Diagnostic{Severity::error, file_, e.path, std::move(msg)});
  }
  void warn(const XmlElement& e, std::string msg) {
    diags.push_back(Diagnostic{Severity::warning, file_, e.path, std::move(msg)});
  }

  /// Required attribute; records an error when missing or empty.
  std::optional<std::string> need(const XmlElement& e, std::string_view key) {
    const auto* v = e.attr(key);
    if (!v || v->empty()) {
      error(e, "missing attribute '" + std::string(key) + "'");
      return std::nullopt;
    }
    return *v;
  }

  void known_attributes(const XmlElement& e, std::initializer_list<std::string_view> keys) {
    detail::warn_unknown_attributes(e, keys, file_, diags);
  }

  std::optional<RelationAtom> relation(const XmlElement& e) {
    known_attributes(e, {"name", "source", "target"});
    auto name = need(e, "name");
    auto source = need(e, "source");
    auto target = need(e, "target");
    if (!name || !source || !target) return std::nullopt;
    return RelationAtom{*name, *source, *target};
  }

  /// Top-level elements named `wanted`, looking one container level deep
  /// (e.g. `<repository><service/>...</repository>`).
  std::vector<const XmlElement*> collect(const XmlElement& root, std::string_view wanted) {
    std::vector<const XmlElement*> out;
    for (const auto& top : root.children) {
      if (top.name == wanted) {
        out.push_back(&top);
        continue;
      }
      bool container = top.children.empty() && (top.name == "repository" || top.name == "definitions" ||
                                                top.name == "inferences" || top.name == "rules");
      for (const auto& c : top.children) {
        if (c.name == wanted) {
          out.push_back(&c);
          container = true;
        }
      }
      if (container) {
        for (const auto& c : top.children) {
          if (c.name != wanted) warn(c, "ignoring unknown element <" + c.name + ">");
        }
      } else {
        warn(top, "ignoring unknown element <" + top.name + ">");
      }
    }
    return out;
  }

  std::vector<Diagnostic> diags;

 private:
  std::string file_;
};

std::optional<ServiceDef> read_service(Reader& rd, const XmlElement& e, bool is_query) {
  rd.known_attributes(e, {"name"});
  ServiceDef def;
  if (const auto* n = e.attr("name"); n && !n->empty()) {
    def.name = *n;
  } else if (is_query) {
    def.name = "query";
  } else {
    rd.error(e, "missing attribute 'name'");
    return std::nullopt;
  }

  bool ok = true;
  std::vector<const XmlElement*> messages;
  std::vector<const XmlElement*> relations;
  for (const auto& c : e.children) {
    if (c.name == "message") {
      messages.push_back(&c);
    } else if (c.name == "relation") {
      relations.push_back(&c);
    } else {
      rd.warn(c, "ignoring unknown element <" + c.name + ">");
    }
  }
  if (messages.size() != 2) {
    rd.error(e, "expected exactly 2 <message> elements (inputs, outputs), found " + std::to_string(messages.size()));
    return std::nullopt;
  }

  std::set<std::string> names;
  for (std::size_t m = 0; m < 2; ++m) {
    rd.known_attributes(*messages[m], {"name"});
    for (const auto& part : messages[m]->children) {
      if (part.name != "part") {
        rd.warn(part, "ignoring unknown element <" + part.name + ">");
        continue;
      }
      rd.known_attributes(part, {"name", "type", "element"});
      auto name = rd.need(part, "name");
      auto type = rd.need(part, "type");
      if (!name || !type) {
        ok = false;
        continue;
      }
      if (!names.insert(*name).second) {
        rd.error(part, "duplicate parameter '" + *name + "'");
        ok = false;
        continue;
      }
      (m == 0 ? def.inputs : def.outputs).push_back(ParamSpec{*name, detail::local_name(*type)});
    }
  }
  if (!is_query && def.outputs.empty()) {
    rd.error(*messages[1], "service has no output parameter");
    ok = false;
  }

  for (const auto* r : relations) {
    auto atom = rd.relation(*r);
    if (!atom) {
      ok = false;
      continue;
    }
    for (const auto* end : {&atom->source, &atom->target}) {
      if (!names.contains(*end)) {
        rd.error(*r, "relation endpoint '" + *end + "' is not a parameter of '" + def.name + "'");
        ok = false;
      }
    }
    def.relations.push_back(std::move(*atom));
  }
  if (!ok) return std::nullopt;
  return def;
}

void write_service(std::string& out, const ServiceDef& s, std::string_view indent) {
  using detail::xml_escape;
  const std::string in(indent);
  out += in + "<service name=\"" + xml_escape(s.name) + "\">\n";
  auto message = [&](const std::vector<ParamSpec>& params, std::string_view suffix) {
    out += in + "  <message name=\"" + xml_escape(s.name) + std::string(suffix) + "\">\n";
    for (const auto& p : params) {
      out += in + "    <part name=\"" + xml_escape(p.name) + "\" type=\"" + xml_escape(p.type) + "\"/>\n";
    }
    out += in + "  </message>\n";
  };
  message(s.inputs, "Input");
  message(s.outputs, "Output");
  for (const auto& r : s.relations) {
    out += in + "  <relation source=\"" + xml_escape(r.source) + "\" target=\"" + xml_escape(r.target) +
           "\" name=\"" + xml_escape(r.relation) + "\"/>\n";
  }
  out += in + "</service>\n";
}

std::string xml_header() { return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n" + std::string(kGeneratedComment) + "\n"; }

}  // namespace

Parsed<std::vector<InferenceRule>> parse_rules(std::string_view text, std::string_view file) {
  Parsed<std::vector<InferenceRule>> out;
  auto doc = detail::parse_xml(text, file);
  if (!doc.ok()) {
    out.diagnostics = std::move(doc.diagnostics);
    return out;
  }
  Reader rd(file);
  std::vector<InferenceRule> rules;
  for (const auto* e : rd.collect(*doc.value, "inference")) {
    rd.known_attributes(*e, {"name"});
    auto name = rd.need(*e, "name");
    InferenceRule rule;
    rule.name = name.value_or("");
    bool ok = name.has_value();
    const XmlElement* input = nullptr;
    const XmlElement* output = nullptr;
    for (const auto& c : e->children) {
      if (c.name == "input" && !input) {
        input = &c;
      } else if (c.name == "output" && !output) {
        output = &c;
      } else {
        rd.warn(c, "ignoring unexpected element <" + c.name + ">");
      }
    }
    if (!input || !output) {
      rd.error(*e, "inference needs an <input> and an <output> element");
      continue;
    }
    for (const auto& c : input->children) {
      if (c.name == "part") {
        rd.known_attributes(c, {"name"});
        if (auto v = rd.need(c, "name")) {
          rule.variables.push_back(*v);
        } else {
          ok = false;
        }
      } else if (c.name == "relation") {
        if (auto a = rd.relation(c)) {
          rule.premise.push_back(std::move(*a));
        } else {
          ok = false;
        }
      } else {
        rd.warn(c, "ignoring unknown element <" + c.name + ">");
      }
    }
    for (const auto& c : output->children) {
      if (c.name == "relation") {
        if (auto a = rd.relation(c)) {
          rule.conclusion.push_back(std::move(*a));
        } else {
          ok = false;
        }
      } else {
        rd.warn(c, "ignoring unknown element <" + c.name + ">");
      }
    }
    if (rule.conclusion.empty() && ok) {
      rd.error(*output, "rule '" + rule.name + "' has an empty output and produces nothing");
      ok = false;
    }
    std::set<std::string> vars(rule.variables.begin(), rule.variables.end());
    for (const auto& list : {&rule.premise, &rule.conclusion}) {
      for (const auto& a : *list) {
        for (const auto* end : {&a.source, &a.target}) {
          if (!vars.contains(*end)) {
            rd.error(*e, "atom endpoint '" + *end + "' is not a declared part of '" + rule.name + "'");
            ok = false;
          }
        }
      }
    }
    if (ok) rules.push_back(std::move(rule));
  }
  out.diagnostics = std::move(rd.diags);
  if (!has_errors(out.diagnostics)) out.value = std::move(rules);
  return out;
}

std::string write_rules(const std::vector<InferenceRule>& rules) {
  using detail::xml_escape;
  std::string out = xml_header() + "<inferences>\n";
  auto relation = [&](const RelationAtom& a) {
    out += "      <relation name=\"" + xml_escape(a.relation) + "\" source=\"" + xml_escape(a.source) +
           "\" target=\"" + xml_escape(a.target) + "\"/>\n";
  };
  for (const auto& r : rules) {
    out += "  <inference name=\"" + xml_escape(r.name) + "\">\n    <input>\n";
    for (const auto& v : r.variables) out += "      <part name=\"" + xml_escape(v) + "\"/>\n";
    for (const auto& a : r.premise) relation(a);
    out += "    </input>\n    <output>\n";
    for (const auto& a : r.conclusion) relation(a);
    out += "    </output>\n  </inference>\n";
  }
  out += "</inferences>\n";
  return out;
}

Parsed<std::vector<ServiceDef>> parse_repository(std::string_view text, std::string_view file) {
  Parsed<std::vector<ServiceDef>> out;
  auto doc = detail::parse_xml(text, file);
  if (!doc.ok()) {
    out.diagnostics = std::move(doc.diagnostics);
    return out;
  }
  Reader rd(file);
  std::vector<ServiceDef> services;
  for (const auto* e : rd.collect(*doc.value, "service")) {
    if (auto s = read_service(rd, *e, false)) services.push_back(std::move(*s));
  }
  out.diagnostics = std::move(rd.diags);
  if (!has_errors(out.diagnostics)) out.value = std::move(services);
  return out;
}

std::string write_repository(const std::vector<ServiceDef>& services) {
  std::string out = xml_header() + "<repository>\n";
  for (const auto& s : services) write_service(out, s, "  ");
  out += "</repository>\n";
  return out;
}

Parsed<ServiceDef> parse_query(std::string_view text, std::string_view file) {
  Parsed<ServiceDef> out;
  auto doc = detail::parse_xml(text, file);
  if (!doc.ok()) {
    out.diagnostics = std::move(doc.diagnostics);
    return out;
  }
  Reader rd(file);
  std::vector<const XmlElement*> found;
  for (const auto& top : doc.value->children) {
    if (top.name == "service" || top.name == "query") {
      found.push_back(&top);
    } else {
      rd.warn(top, "ignoring unknown element <" + top.name + ">");
    }
  }
  if (found.size() != 1) {
    out.diagnostics = std::move(rd.diags);
    out.diagnostics.push_back(Diagnostic{Severity::error, std::string(file), {},
                                         "expected exactly one <service> or <query> element, found " +
                                             std::to_string(found.size())});
    return out;
  }
  auto q = read_service(rd, *found.front(), true);
  out.diagnostics = std::move(rd.diags);
  if (q && !has_errors(out.diagnostics)) out.value = std::move(*q);
  return out;
}

std::string write_query(const ServiceDef& query) {
  std::string out = xml_header();
  write_service(out, query, "");
  return out;
}

}  // namespace relcompose

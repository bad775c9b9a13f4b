#include "xml_reader.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace relcompose::detail {

namespace pt = boost::property_tree;

const std::string* XmlElement::attr(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string local_name(std::string_view qualified) {
  auto colon = qualified.rfind(':');
  return std::string(colon == std::string_view::npos ? qualified : qualified.substr(colon + 1));
}

namespace {

constexpr std::string_view kSyntheticRoot = "relcompose-document";

/// Removes a leading XML declaration and doctype so that the text can be
/// wrapped in a synthetic root element. Newlines are kept for line numbers.
std::string strip_prolog(std::string_view text) {
  std::string s(text);
  if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF && static_cast<unsigned char>(s[1]) == 0xBB &&
      static_cast<unsigned char>(s[2]) == 0xBF) {
    s.erase(0, 3);
  }
  for (std::string_view open : {"<?xml", "<!DOCTYPE"}) {
    auto start = s.find_first_not_of(" \t\r\n");
    if (start == std::string::npos || s.compare(start, open.size(), open) != 0) continue;
    auto end = s.find('>', start);
    if (end == std::string::npos) break;
    for (auto i = start; i <= end; ++i) {
      if (s[i] != '\n') s[i] = ' ';
    }
  }
  return s;
}

void convert(const pt::ptree& tree, XmlElement& into) {
  std::map<std::string, int> seen;
  for (const auto& [key, child] : tree) {
    if (key == "<xmlattr>") {
      for (const auto& [attr, value] : child) {
        if (attr == "xmlns" || attr.rfind("xmlns:", 0) == 0) continue;
        into.attributes.emplace_back(local_name(attr), value.data());
      }
      continue;
    }
    if (key == "<xmlcomment>") continue;
    XmlElement e;
    e.name = local_name(key);
    const int n = ++seen[e.name];
    e.path = (into.path.empty() ? "" : into.path + "/") + e.name + "[" + std::to_string(n) + "]";
    e.text = child.data();
    convert(child, e);
    into.children.push_back(std::move(e));
  }
}

}  // namespace

Parsed<XmlElement> parse_xml(std::string_view text, std::string_view file) {
  Parsed<XmlElement> out;
  std::string wrapped = "<" + std::string(kSyntheticRoot) + ">" + strip_prolog(text) + "</" +
                        std::string(kSyntheticRoot) + ">";
  std::istringstream in(wrapped);
  pt::ptree tree;
  try {
    pt::read_xml(in, tree, pt::xml_parser::no_comments | pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    out.diagnostics.push_back(Diagnostic{Severity::error, std::string(file), "line " + std::to_string(e.line()),
                                         "malformed XML: " + e.message()});
    return out;
  } catch (const std::exception& e) {
    out.diagnostics.push_back(Diagnostic{Severity::error, std::string(file), {}, std::string("malformed XML: ") + e.what()});
    return out;
  }
  XmlElement root;
  auto it = tree.find(std::string(kSyntheticRoot));
  if (it != tree.not_found()) convert(it->second, root);
  out.value = std::move(root);
  return out;
}

void warn_unknown_attributes(const XmlElement& e, std::initializer_list<std::string_view> known,
                             std::string_view file, std::vector<Diagnostic>& out) {
  for (const auto& [k, v] : e.attributes) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      out.push_back(Diagnostic{Severity::warning, std::string(file), e.path, "ignoring unknown attribute '" + k + "'"});
    }
  }
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace relcompose::detail

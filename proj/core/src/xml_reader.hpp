#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relcompose/diagnostics.hpp"

namespace relcompose::detail {

/// Namespace-stripped view of an XML element. `path` is the element path
/// from the document top, e.g. `repository[1]/service[3]/message[2]`.
struct XmlElement {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlElement> children;
  std::string text;
  std::string path;

  const std::string* attr(std::string_view key) const;
};

/// Parses a document or a bare sequence of elements. The returned element is
/// a synthetic root (empty name) whose children are the top-level elements.
Parsed<XmlElement> parse_xml(std::string_view text, std::string_view file);

std::string local_name(std::string_view qualified);

/// Warns about every attribute of `e` not listed in `known`.
void warn_unknown_attributes(const XmlElement& e, std::initializer_list<std::string_view> known,
                             std::string_view file, std::vector<Diagnostic>& out);

std::string xml_escape(std::string_view s);

}  // namespace relcompose::detail

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rentlens {

// Just enough XML for VPR-style .net files: elements, attributes, text,
// comments, declarations, the five named entities and numeric references.
// No namespaces, no CDATA, no DTD content.
struct XmlNode {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<XmlNode> children;
  std::string text;

  const std::string* attr(std::string_view key) const {
    for (const auto& [k, v] : attrs) {
      if (k == key) {
        return &v;
      }
    }
    return nullptr;
  }
};

// Returns the single root element. Throws ParseError (with line/column) on
// anything malformed.
XmlNode parse_xml(std::string_view text);

// Escape text for emission inside an attribute value or text node.
std::string xml_escape(std::string_view raw);

}  // namespace rentlens

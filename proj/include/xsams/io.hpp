#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xsams/model.hpp"
#include "xsams/xml.hpp"

namespace xsams {

inline constexpr std::string_view kXsamsNamespace = "http://vamdc.org/xml/xsams/1.0";
inline constexpr std::string_view kXsiNamespace =
    "http://www.w3.org/2001/XMLSchema-instance";

struct ParseDiagnostics {
  std::vector<xml::Warning> warnings;
  bool recovered = false;  // true when malformed markup was repaired
};

struct ParseResult {
  XsamsDocument document;
  ParseDiagnostics diagnostics;
};

// Throws Error with XmlSyntax, UnknownOriginKind or MissingRequiredField.
ParseResult parse(std::string_view bytes);
XsamsDocument parse_document(std::string_view bytes);

std::string serialize(const XsamsDocument& doc);

// Element tree the writer emits; exposed for the canonical form and tests.
xml::Element to_element(const XsamsDocument& doc);

// Timestamp-free form: every Origin extraction timestamp and the production
// date and year of every self-reference source are replaced by sentinels,
// attributes are sorted, and no indentation is emitted.
std::string canonical_form(const XsamsDocument& doc);

// Lower-case hex SHA-256 of canonical_form(doc).
std::string canonical_digest(const XsamsDocument& doc);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace xsams

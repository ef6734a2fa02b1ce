#pragma once

// Small XML element tree plus a tolerant reader and a writer.
//
// The reader accepts the slightly broken markup produced by real data nodes
// (bare '&' in URLs, whitespace after "</") and records each repair as a
// warning. Anything structurally broken (mismatched or unclosed tags) is an
// XmlSyntax error.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xsams::xml {

struct Location {
  std::size_t line = 1;
  std::size_t column = 1;

  friend bool operator==(const Location&, const Location&) = default;
};

std::string to_string(const Location& loc);

struct Attribute {
  std::string name;
  std::string value;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct Element {
  std::string name;  // qualified name as written, e.g. "dcs:QNs"
  std::vector<Attribute> attributes;
  std::string text;  // character data directly inside this element
  std::vector<Element> children;
  Location location;  // not part of equality

  const Attribute* find_attribute(std::string_view qname) const;
  std::optional<std::string> attribute(std::string_view qname) const;
  const Element* child(std::string_view qname) const;
  std::vector<const Element*> children_named(std::string_view qname) const;

  friend bool operator==(const Element& a, const Element& b) {
    return a.name == b.name && a.attributes == b.attributes &&
           a.text == b.text && a.children == b.children;
  }
};

// Part after the colon of a qualified name ("dcs:J" -> "J").
std::string_view local_name(std::string_view qname);
// Part before the colon, empty when unprefixed.
std::string_view prefix(std::string_view qname);

struct Warning {
  Location location;
  std::string message;

  friend bool operator==(const Warning&, const Warning&) = default;
};

struct ReadResult {
  Element root;
  std::vector<Warning> warnings;
};

// Throws Error(XmlSyntax) on unrecoverable input.
ReadResult read(std::string_view bytes);

std::string escape_text(std::string_view s);
std::string escape_attribute(std::string_view s);

struct WriteOptions {
  bool indent = true;           // two spaces, one element per line
  bool sort_attributes = false;  // canonical form
  bool declaration = true;
};

void write(std::string& out, const Element& e, const WriteOptions& opts,
           int depth = 0);
std::string write(const Element& e, const WriteOptions& opts = {});

}  // namespace xsams::xml

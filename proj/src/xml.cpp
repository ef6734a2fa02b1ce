#include "xsams/xml.hpp"

#include <algorithm>
#include <cstdint>

#include "xsams/error.hpp"

namespace xsams::xml {

std::string to_string(const Location& loc) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

const Attribute* Element::find_attribute(std::string_view qname) const {
  for (const auto& a : attributes) {
    if (a.name == qname) return &a;
  }
  return nullptr;
}

std::optional<std::string> Element::attribute(std::string_view qname) const {
  if (const auto* a = find_attribute(qname)) return a->value;
  return std::nullopt;
}

const Element* Element::child(std::string_view qname) const {
  for (const auto& c : children) {
    if (c.name == qname) return &c;
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(
    std::string_view qname) const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c.name == qname) out.push_back(&c);
  }
  return out;
}

std::string_view local_name(std::string_view qname) {
  auto pos = qname.find(':');
  return pos == std::string_view::npos ? qname : qname.substr(pos + 1);
}

std::string_view prefix(std::string_view qname) {
  auto pos = qname.find(':');
  return pos == std::string_view::npos ? std::string_view{}
                                       : qname.substr(0, pos);
}

namespace {

constexpr int kMaxDepth = 256;

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool is_name_char(char c) {
  return !is_space(c) && c != '/' && c != '>' && c != '<' && c != '=' &&
         c != '"' && c != '\'' && c != '&' && c != ';';
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  ReadResult run() {
    if (in_.substr(0, 3) == "\xEF\xBB\xBF") advance(3);
    skip_misc();
    if (at_end() || peek() != '<') fail("expected root element");
    ReadResult result;
    result.root = element(0);
    skip_misc();
    if (!at_end()) fail("content after root element");
    result.warnings = std::move(warnings_);
    return result;
  }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
  Location loc_;
  std::vector<Warning> warnings_;

  bool at_end() const { return pos_ >= in_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < in_.size() ? in_[pos_ + ahead] : '\0';
  }
  bool starts_with(std::string_view s) const {
    return in_.substr(pos_, s.size()) == s;
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < in_.size(); ++i, ++pos_) {
      if (in_[pos_] == '\n') {
        ++loc_.line;
        loc_.column = 1;
      } else if ((static_cast<unsigned char>(in_[pos_]) & 0xC0) != 0x80) {
        ++loc_.column;
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::XmlSyntax, to_string(loc_), what);
  }

  void warn(Location at, std::string message) {
    warnings_.push_back({at, std::move(message)});
  }

  void skip_space() {
    while (!at_end() && is_space(peek())) advance();
  }

  void skip_until(std::string_view terminator) {
    auto end = in_.find(terminator, pos_);
    if (end == std::string_view::npos) fail("unterminated markup");
    advance(end - pos_ + terminator.size());
  }

  // Declarations, comments, processing instructions and whitespace that may
  // surround the root element.
  void skip_misc() {
    for (;;) {
      skip_space();
      if (starts_with("<?")) {
        skip_until("?>");
      } else if (starts_with("<!--")) {
        skip_until("-->");
      } else if (starts_with("<!DOCTYPE")) {
        skip_until(">");
      } else {
        return;
      }
    }
  }

  std::string name() {
    auto start = pos_;
    while (!at_end() && is_name_char(peek())) advance();
    if (pos_ == start) fail("expected a name");
    return std::string(in_.substr(start, pos_ - start));
  }

  // Decodes one reference starting at '&'. A bare ampersand is kept literally.
  void reference(std::string& out) {
    Location at = loc_;
    std::size_t semi = in_.find(';', pos_);
    std::size_t limit = std::min(in_.size(), pos_ + 12);
    if (semi == std::string_view::npos || semi >= limit) {
      warn(at, "unescaped '&' kept literally");
      out += '&';
      advance();
      return;
    }
    std::string_view ent = in_.substr(pos_ + 1, semi - pos_ - 1);
    bool ok = true;
    if (ent == "lt") {
      out += '<';
    } else if (ent == "gt") {
      out += '>';
    } else if (ent == "amp") {
      out += '&';
    } else if (ent == "quot") {
      out += '"';
    } else if (ent == "apos") {
      out += '\'';
    } else if (!ent.empty() && ent[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
      auto digits = ent.substr(hex ? 2 : 1);
      ok = !digits.empty();
      for (char c : digits) {
        int d = -1;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        if (d < 0 || cp > 0x10FFFF) {
          ok = false;
          break;
        }
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
      }
      if (ok) append_utf8(out, cp);
    } else {
      ok = false;
    }
    if (!ok) {
      warn(at, "unknown entity '&" + std::string(ent) + ";' kept literally");
      out += '&';
      advance();
      return;
    }
    advance(semi - pos_ + 1);
  }

  std::string attribute_value() {
    char quote = peek();
    if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
    advance();
    std::string value;
    while (!at_end() && peek() != quote) {
      char c = peek();
      if (c == '<') fail("'<' in attribute value");
      if (c == '&') {
        reference(value);
        continue;
      }
      // Attribute-value normalization: literal whitespace becomes a space.
      value += is_space(c) ? ' ' : c;
      advance();
    }
    if (at_end()) fail("unterminated attribute value");
    advance();
    return value;
  }

  Element element(int depth) {
    if (depth > kMaxDepth) fail("element nesting too deep");
    Element e;
    e.location = loc_;
    advance();  // '<'
    e.name = name();
    for (;;) {
      skip_space();
      if (at_end()) fail("unterminated start tag <" + e.name + ">");
      if (starts_with("/>")) {
        advance(2);
        return e;
      }
      if (peek() == '>') {
        advance();
        break;
      }
      Attribute a;
      a.name = name();
      skip_space();
      if (peek() != '=') fail("expected '=' after attribute " + a.name);
      advance();
      skip_space();
      a.value = attribute_value();
      if (e.find_attribute(a.name)) fail("duplicate attribute " + a.name);
      e.attributes.push_back(std::move(a));
    }
    content(e, depth);
    return e;
  }

  void content(Element& e, int depth) {
    for (;;) {
      if (at_end()) fail("unclosed element <" + e.name + ">");
      char c = peek();
      if (c == '<') {
        if (starts_with("</")) {
          end_tag(e);
          break;
        }
        if (starts_with("<!--")) {
          skip_until("-->");
        } else if (starts_with("<![CDATA[")) {
          advance(9);
          auto end = in_.find("]]>", pos_);
          if (end == std::string_view::npos) fail("unterminated CDATA");
          e.text.append(in_.substr(pos_, end - pos_));
          advance(end - pos_ + 3);
        } else if (starts_with("<?")) {
          skip_until("?>");
        } else {
          e.children.push_back(element(depth + 1));
        }
      } else if (c == '&') {
        reference(e.text);
      } else {
        e.text += c;
        advance();
      }
    }
    if (!e.children.empty() &&
        std::all_of(e.text.begin(), e.text.end(), is_space)) {
      e.text.clear();
    }
  }

  void end_tag(const Element& e) {
    Location at = loc_;
    advance(2);
    if (!at_end() && is_space(peek())) {
      warn(at, "whitespace after '</' in end tag of <" + e.name + ">");
      skip_space();
    }
    std::string closing = name();
    if (closing != e.name) {
      fail("mismatched end tag </" + closing + "> for <" + e.name + "> opened at " +
           to_string(e.location));
    }
    skip_space();
    if (peek() != '>') fail("expected '>' in end tag");
    advance();
  }
};

void indent_to(std::string& out, int depth) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
}

}  // namespace

ReadResult read(std::string_view bytes) { return Reader(bytes).run(); }

std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_attribute(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#10;"; break;
      case '\t': out += "&#9;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

void write(std::string& out, const Element& e, const WriteOptions& opts,
           int depth) {
  if (opts.indent) indent_to(out, depth);
  out += '<';
  out += e.name;
  std::vector<const Attribute*> attrs;
  attrs.reserve(e.attributes.size());
  for (const auto& a : e.attributes) attrs.push_back(&a);
  if (opts.sort_attributes) {
    std::sort(attrs.begin(), attrs.end(),
              [](const Attribute* a, const Attribute* b) { return a->name < b->name; });
  }
  for (const auto* a : attrs) {
    out += ' ';
    out += a->name;
    out += "=\"";
    out += escape_attribute(a->value);
    out += '"';
  }
  if (e.children.empty()) {
    if (e.text.empty()) {
      out += "/>";
    } else {
      out += '>';
      out += escape_text(e.text);
      out += "</";
      out += e.name;
      out += '>';
    }
    if (opts.indent) out += '\n';
    return;
  }
  out += '>';
  out += escape_text(e.text);
  if (opts.indent) out += '\n';
  for (const auto& c : e.children) write(out, c, opts, depth + 1);
  if (opts.indent) indent_to(out, depth);
  out += "</";
  out += e.name;
  out += '>';
  if (opts.indent) out += '\n';
}

std::string write(const Element& e, const WriteOptions& opts) {
  std::string out;
  if (opts.declaration) {
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>";
    if (opts.indent) out += '\n';
  }
  write(out, e, opts, 0);
  return out;
}

}  // namespace xsams::xml

#include "xsams/bibtex.hpp"

#include <cctype>
#include <set>

namespace xsams::bibtex {

const std::string* BibEntry::field(std::string_view name) const {
  for (const auto& [k, v] : fields) {
    if (k == name) return &v;
  }
  return nullptr;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Runs of whitespace become one space.
std::string squeeze(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += ' ';
    pending = false;
    out += c;
  }
  return out;
}

// Joins a URL wrapped over several lines: a line break and the indentation
// around it are dropped, other spaces are kept.
std::string unwrap_url(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '\n' || s[i] == '\r') {
      while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
      while (i < s.size() && is_space(s[i])) ++i;
      continue;
    }
    out += s[i++];
  }
  auto b = out.find_first_not_of(" \t");
  auto e = out.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : out.substr(b, e - b + 1);
}

std::string family_name(std::string_view name) {
  auto n = squeeze(name);
  if (auto comma = n.find(','); comma != std::string::npos) return n.substr(0, comma);
  auto space = n.rfind(' ');
  return space == std::string::npos ? n : n.substr(space + 1);
}

std::string key_token(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (c < 0x80 && std::isalnum(c)) out += static_cast<char>(c);
  }
  return out;
}

}  // namespace

std::string invert_name(std::string_view name) {
  auto n = squeeze(name);
  if (n.find(',') != std::string::npos) return n;
  auto space = n.rfind(' ');
  if (space == std::string::npos) return n;
  return n.substr(space + 1) + ", " + n.substr(0, space);
}

std::vector<Source> sources_of(const XsamsDocument& doc) {
  std::vector<Source> out;
  std::set<std::string> seen;
  for (const auto& s : doc.sources) {
    if (seen.insert(s.source_id).second) out.push_back(s);
  }
  return out;
}

BibEntry to_entry(const Source& src) {
  BibEntry e;
  e.kind = src.category == "journal" ? EntryKind::Article : EntryKind::Misc;
  std::string family = src.authors.empty() ? std::string() : key_token(family_name(src.authors.front()));
  e.key = family + (src.year ? key_token(*src.year) : std::string()) + key_token(src.source_id);

  auto add = [&](std::string name, const std::optional<std::string>& value) {
    if (value && !squeeze(*value).empty()) e.fields.emplace_back(std::move(name), squeeze(*value));
  };
  if (!src.authors.empty()) {
    std::string authors;
    for (const auto& a : src.authors) {
      if (!authors.empty()) authors += " and ";
      authors += invert_name(a);
    }
    e.fields.emplace_back("author", authors);
  }
  bool has_title = src.title && !squeeze(*src.title).empty();
  if (e.kind == EntryKind::Article) {
    add("title", src.title);
    add("journal", src.source_name);
  } else {
    add("title", has_title ? src.title : src.source_name);
  }
  add("year", src.year);
  add("volume", src.volume);
  if (src.page_begin && src.page_end) {
    add("pages", squeeze(*src.page_begin) + "--" + squeeze(*src.page_end));
  } else {
    add("pages", src.page_begin ? src.page_begin : src.page_end);
  }
  add("doi", src.doi);
  if (src.uri) {
    auto url = unwrap_url(*src.uri);
    if (!url.empty()) e.fields.emplace_back(e.kind == EntryKind::Article ? "url" : "howpublished", url);
  }
  if (e.kind == EntryKind::Misc) {
    std::string note = src.comments ? squeeze(*src.comments) : std::string();
    if (src.production_date) {
      if (!note.empty()) note += ". ";
      note += "Produced " + squeeze(*src.production_date);
    }
    if (!note.empty()) e.fields.emplace_back("note", note);
  } else {
    add("note", src.comments);
  }
  return e;
}

namespace {

// Values with unbalanced braces would end the field early; escape them all.
std::string braced(const std::string& v) {
  int depth = 0;
  bool balanced = true;
  for (char c : v) {
    if (c == '{') ++depth;
    if (c == '}' && --depth < 0) balanced = false;
  }
  if (balanced && depth == 0) return v;
  std::string out;
  for (char c : v) {
    if (c == '{' || c == '}') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string render(const BibEntry& entry) {
  std::string out = entry.kind == EntryKind::Article ? "@article{" : "@misc{";
  out += entry.key;
  for (const auto& [k, v] : entry.fields) {
    out += ",\n  ";
    out += k;
    out += " = {";
    out += braced(v);
    out += '}';
  }
  out += "\n}\n";
  return out;
}

std::string to_bibtex(const Source& src) { return render(to_entry(src)); }

std::string doc_to_bibtex(const XsamsDocument& doc, const Options& options) {
  std::string out;
  for (const auto& s : sources_of(doc)) {
    if (!options.include_self_references && s.is_self_reference()) continue;
    if (!out.empty()) out += '\n';
    out += to_bibtex(s);
  }
  return out;
}

}  // namespace xsams::bibtex

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "xsams/model.hpp"

namespace xsams::bibtex {

enum class EntryKind { Article, Misc };

struct BibEntry {
  EntryKind kind = EntryKind::Misc;
  std::string key;
  std::vector<std::pair<std::string, std::string>> fields;  // emission order

  const std::string* field(std::string_view name) const;
};

// Document order, first occurrence of each source id wins.
std::vector<Source> sources_of(const XsamsDocument& doc);

// "N. Balakrishnan" -> "Balakrishnan, N."; names that already contain a
// comma are returned unchanged.
std::string invert_name(std::string_view name);

BibEntry to_entry(const Source& src);
std::string render(const BibEntry& entry);
std::string to_bibtex(const Source& src);

struct Options {
  bool include_self_references = true;
};

// Entries separated by one blank line; empty text when there are none.
std::string doc_to_bibtex(const XsamsDocument& doc, const Options& options = {});

}  // namespace xsams::bibtex

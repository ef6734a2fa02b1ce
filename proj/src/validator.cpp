#include "xsams/validator.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace xsams {

bool ValidationReport::has_error(std::string_view code) const {
  return std::any_of(errors.begin(), errors.end(),
                     [&](const Finding& f) { return f.code == code; });
}

bool ValidationReport::has_warning(std::string_view code) const {
  return std::any_of(warnings.begin(), warnings.end(),
                     [&](const Finding& f) { return f.code == code; });
}

namespace {

struct Checker {
  const XsamsDocument& doc;
  ValidationReport report;
  std::map<std::string, ElementKind> kinds;
  std::map<std::string, std::string> state_owner;  // state -> species

  void error(std::string_view code, std::string subject, std::string message) {
    report.errors.push_back({std::string(code), std::move(subject), std::move(message)});
  }
  void warning(std::string_view code, std::string subject, std::string message) {
    report.warnings.push_back({std::string(code), std::move(subject), std::move(message)});
  }

  void identifiers() {
    auto add = [&](const std::string& id, ElementKind kind) {
      auto [it, inserted] = kinds.emplace(id, kind);
      if (!inserted) {
        error(rule::kDuplicateIdentifier, id,
              "declared as " + std::string(to_string(it->second)) + " and again as " +
                  std::string(to_string(kind)));
      }
    };
    for (const auto& a : doc.atoms) {
      add(a.species_id, ElementKind::Species);
      for (const auto& s : a.states) {
        add(s.state_id, ElementKind::State);
        state_owner.emplace(s.state_id, a.species_id);
      }
    }
    for (const auto& m : doc.molecules) {
      add(m.species_id, ElementKind::Species);
      for (const auto& s : m.states) {
        add(s.state_id, ElementKind::State);
        state_owner.emplace(s.state_id, m.species_id);
      }
    }
    for (const auto& p : doc.radiative) add(p.id, ElementKind::Process);
    for (const auto& p : doc.collisions) add(p.id, ElementKind::Process);
    for (const auto& s : doc.sources) add(s.source_id, ElementKind::Source);
    for (const auto* v : all_versions(doc)) add(v->version_id, ElementKind::Version);
  }

  // Reports a dangling reference or one pointing at the wrong kind of element.
  bool reference(const std::string& id, ElementKind expected, const std::string& from) {
    auto it = kinds.find(id);
    if (it == kinds.end()) {
      error(rule::kUnresolvedReference, id, "referenced from " + from + " but never declared");
      return false;
    }
    if (it->second != expected) {
      error(rule::kWrongReferenceKind, id,
            "referenced from " + from + " as " + std::string(to_string(expected)) +
                " but declared as " + std::string(to_string(it->second)));
      return false;
    }
    return true;
  }

  void state_of_species(const std::string& species, const std::string& state,
                        const std::string& from) {
    if (!reference(species, ElementKind::Species, from) ||
        !reference(state, ElementKind::State, from)) {
      return;
    }
    auto owner = state_owner.at(state);
    if (owner != species) {
      error(rule::kStateSpeciesMismatch, state,
            "referenced from " + from + " with species " + species +
                " but belongs to " + owner);
    }
  }

  void origin(const Origin& o, const std::string& path) {
    auto missing = [&](std::string_view field) {
      error(rule::kMissingRequiredField, path,
            std::string(to_xsi_type(o.kind)) + " lacks " + std::string(field));
    };
    if (o.timestamp.text.empty()) missing("Timestamp");
    if (o.versions.empty()) missing("Version");
    if (o.homepage_url.empty()) missing("HomepageUrl");
    if (o.name.empty()) missing("Name");
    if (!o.timestamp.text.empty() && !o.timestamp.valid()) {
      error(rule::kInvalidTimestamp, path, "extraction timestamp '" + o.timestamp.text + "'");
    }
    switch (o.kind) {
      case OriginKind::Node:
        if (!o.query || o.query->empty()) missing("Query");
        if (!o.origin_identifier || o.origin_identifier->empty()) missing("OriginIdentifier");
        if (!o.sub_origins.empty()) {
          error(rule::kNodeOriginWithSubOrigins, path,
                "node origin carries " + std::to_string(o.sub_origins.size()) + " sub-origins");
        }
        break;
      case OriginKind::Processor:
        if (!o.origin_identifier || o.origin_identifier->empty()) missing("OriginIdentifier");
        if (o.sub_origins.empty()) {
          error(rule::kProcessorWithoutSubOrigins, path, "processor origin lists no input origins");
        }
        [[fallthrough]];
      case OriginKind::Other:
        if (o.query) {
          error(rule::kUnexpectedQuery, path,
                std::string(to_xsi_type(o.kind)) + " may not carry a Query");
        }
        break;
    }
    auto extracted = o.timestamp.utc_seconds();
    for (const auto& v : o.versions) {
      auto published = v.timestamp.utc_seconds();
      if (!published) {
        error(rule::kInvalidTimestamp, v.version_id, "publication timestamp '" + v.timestamp.text + "'");
      } else if (extracted && *published > *extracted) {
        warning(rule::kPublicationAfterExtraction, v.version_id,
                "published " + v.timestamp.text + " after extraction " + o.timestamp.text);
      }
      version_refs(v);
    }
    for (std::size_t i = 0; i < o.sub_origins.size(); ++i) {
      origin(o.sub_origins[i], path + "/" + std::to_string(i + 1));
    }
  }

  void version_refs(const Version& v) {
    std::string from = "version " + v.version_id;
    for (const auto& id : v.species_refs) reference(id, ElementKind::Species, from);
    for (const auto& id : v.state_refs) reference(id, ElementKind::State, from);
    for (const auto& id : v.process_refs) reference(id, ElementKind::Process, from);
    for (const auto& id : v.source_refs) reference(id, ElementKind::Source, from);
    if (v.global) {
      if (doc.origins.size() != 1 || origin_tree_depth(doc.origins) != 1) {
        std::size_t count = 0;
        for_each_origin(doc.origins, [&](const Origin&) { ++count; });
        error(rule::kGlobalVersionWithMultipleOrigins, v.version_id,
              "global version in a document with " + std::to_string(count) + " origins");
      }
      if (!v.empty()) {
        error(rule::kGlobalVersionWithReferences, v.version_id,
              "global version lists explicit members");
      }
    }
  }

  void membership() {
    auto versions = all_versions(doc);
    std::map<std::string, std::vector<std::string>> claims;
    bool any_global = false;
    auto all_ids = data_identifiers(doc);
    // A misplaced global version is reported in version_refs; expanding it
    // here would repeat that as a membership clash for every identifier.
    bool global_allowed = doc.origins.size() == 1 && origin_tree_depth(doc.origins) == 1;
    for (const auto* v : versions) {
      std::set<std::string> mine;
      if (v->global && global_allowed) {
        any_global = true;
        mine.insert(all_ids.begin(), all_ids.end());
      }
      for (const auto* list : {&v->species_refs, &v->state_refs, &v->process_refs, &v->source_refs}) {
        mine.insert(list->begin(), list->end());
      }
      for (const auto& id : mine) claims[id].push_back(v->version_id);
    }
    for (const auto& [id, owners] : claims) {
      if (owners.size() > 1) {
        std::string list;
        for (const auto& o : owners) list += (list.empty() ? "" : ", ") + o;
        error(rule::kMultipleVersionMembership, id, "claimed by versions " + list);
      }
    }
    if (doc.origins.empty()) {
      warning(rule::kNoOrigin, "", "document carries no provenance Origin");
      return;
    }
    if (any_global) return;
    for (const auto& id : all_ids) {
      if (!claims.count(id)) {
        warning(rule::kVersionOrphan, id, std::string(to_string(kinds.at(id))) +
                                              " belongs to no version");
      }
    }
  }

  void species() {
    for (const auto& a : doc.atoms) {
      if (a.nuclear_charge < 1) {
        error(rule::kInvalidSpecies, a.species_id, "nuclear charge must be at least 1");
      }
      for (const auto& s : a.states) {
        for (const auto& r : s.source_refs) reference(r, ElementKind::Source, "state " + s.state_id);
      }
    }
    for (const auto& m : doc.molecules) {
      if (m.partition_function &&
          m.partition_function->temperatures.size() != m.partition_function->values.size()) {
        error(rule::kLengthMismatch, m.species_id,
              "partition function has " + std::to_string(m.partition_function->temperatures.size()) +
                  " temperatures and " + std::to_string(m.partition_function->values.size()) +
                  " values");
      }
      for (const auto& s : m.states) {
        std::string from = "state " + s.state_id;
        for (const auto& r : s.source_refs) reference(r, ElementKind::Source, from);
        if (s.energy_origin_ref) state_of_species(m.species_id, *s.energy_origin_ref, from);
        std::set<std::string> names;
        for (const auto& [name, value] : s.quantum_numbers) {
          if (!names.insert(name).second) {
            error(rule::kDuplicateIdentifier, s.state_id, "quantum number " + name + " repeated");
          }
        }
      }
    }
  }

  void processes() {
    for (const auto& t : doc.radiative) {
      std::string from = "process " + t.id;
      for (const auto& r : t.source_refs) reference(r, ElementKind::Source, from);
      if (t.species_ref.empty()) {
        error(rule::kMissingRequiredField, t.id, "radiative transition lacks SpeciesRef");
        continue;
      }
      for (const auto* state : {&t.upper_state_ref, &t.lower_state_ref}) {
        if (!state->empty()) state_of_species(t.species_ref, *state, from);
      }
    }
    for (const auto& t : doc.collisions) {
      std::string from = "process " + t.id;
      for (const auto& r : t.source_refs) reference(r, ElementKind::Source, from);
      for (const auto* side : {&t.reactants, &t.products}) {
        for (const auto& r : *side) {
          if (r.state_ref.empty()) reference(r.species_ref, ElementKind::Species, from);
          else state_of_species(r.species_ref, r.state_ref, from);
        }
      }
      for (const auto& d : t.datasets) {
        if (d.x_values.size() != d.y_values.size()) {
          error(rule::kLengthMismatch, t.id,
                "dataset '" + d.description + "' has " + std::to_string(d.x_values.size()) +
                    " x values and " + std::to_string(d.y_values.size()) + " y values");
        }
      }
    }
  }

  void sources() {
    for (const auto& s : doc.sources) {
      if (s.source_id.empty()) error(rule::kInvalidSource, "", "source without sourceID");
      if (s.year) {
        bool four_digits = s.year->size() == 4 &&
                           std::all_of(s.year->begin(), s.year->end(),
                                       [](char c) { return c >= '0' && c <= '9'; });
        if (!four_digits) error(rule::kInvalidSource, s.source_id, "year '" + *s.year + "' is not 4 digits");
      }
      if (s.authors.empty() && (!s.comments || s.comments->empty())) {
        warning(rule::kSourceWithoutAuthors, s.source_id, "no authors and no comments");
      }
    }
  }

  void run() {
    identifiers();
    for (std::size_t i = 0; i < doc.origins.size(); ++i) {
      origin(doc.origins[i], "Origin[" + std::to_string(i + 1) + "]");
    }
    membership();
    species();
    processes();
    sources();
  }
};

bool finding_less(const Finding& a, const Finding& b) {
  return std::tie(a.code, a.subject, a.message) < std::tie(b.code, b.subject, b.message);
}

}  // namespace

ValidationReport validate(const XsamsDocument& doc) {
  Checker checker{doc, {}, {}, {}};
  checker.run();
  return std::move(checker.report);
}

std::string explain(const ValidationReport& report) {
  auto errors = report.errors;
  auto warnings = report.warnings;
  std::stable_sort(errors.begin(), errors.end(), finding_less);
  std::stable_sort(warnings.begin(), warnings.end(), finding_less);
  std::string out;
  auto line = [&](std::string_view level, const Finding& f) {
    out += level;
    out += ' ';
    out += f.code;
    if (!f.subject.empty()) {
      out += ' ';
      out += f.subject;
    }
    out += ": ";
    out += f.message;
    out += '\n';
  };
  for (const auto& f : errors) line("ERROR", f);
  for (const auto& f : warnings) line("WARN", f);
  out += report.valid() ? "OK: " : "INVALID: ";
  out += std::to_string(report.errors.size()) + " errors, " +
         std::to_string(report.warnings.size()) + " warnings";
  return out;
}

}  // namespace xsams

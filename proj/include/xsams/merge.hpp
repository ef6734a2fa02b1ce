#pragma once

// Combines a spectroscopic and a collisional document: molecules present in
// both are taken from the spectroscopic side, collisional state references
// are rewritten onto matching spectroscopic states, and both input Origins
// are nested under a new root Origin describing the merge tool.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xsams/model.hpp"

namespace xsams::merge {

struct MatchSpec {
  std::vector<std::string> match_keys;  // quantum-number names, e.g. {"J"}
};

struct StateMatching {
  std::vector<std::pair<std::string, std::string>> pairs;  // collisional -> spectroscopic
  std::vector<std::string> unmatched_collisional;
  std::vector<std::string> unmatched_spectroscopic;

  const std::string* target_of(std::string_view collisional_state) const;
};

struct ToolConfig {
  std::string name;
  std::string homepage_url;
  std::optional<std::string> comment;
  std::optional<std::string> origin_identifier;
};

// Same VAMDCSpeciesID, or same InChIKey when either id is missing.
bool same_species(const MoleculeSpecies& a, const MoleculeSpecies& b);

// Auxiliary states never take part. Throws SpeciesMismatch when the
// molecules do not pair, AmbiguousMatch when a state has several candidates
// or two collisional states claim the same spectroscopic one, and
// InvalidInput when match_keys is empty.
StateMatching crossmatch_states(const MoleculeSpecies& spectroscopic,
                                const MoleculeSpecies& collisional, const MatchSpec& spec);

// Throws MultipleRootOrigins, DuplicateIdentifier, UnmatchedReferencedState
// and whatever crossmatch_states throws.
XsamsDocument merge(const XsamsDocument& spectroscopic, const XsamsDocument& collisional,
                    const MatchSpec& spec, const ToolConfig& tool, const Timestamp& now);

}  // namespace xsams::merge

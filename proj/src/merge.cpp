#include "xsams/merge.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "xsams/error.hpp"

namespace xsams::merge {

const std::string* StateMatching::target_of(std::string_view collisional_state) const {
  for (const auto& [from, to] : pairs) {
    if (from == collisional_state) return &to;
  }
  return nullptr;
}

bool same_species(const MoleculeSpecies& a, const MoleculeSpecies& b) {
  if (!a.vamdc_species_id.empty() && !b.vamdc_species_id.empty()) {
    return a.vamdc_species_id == b.vamdc_species_id;
  }
  return !a.inchikey.empty() && a.inchikey == b.inchikey;
}

namespace {

bool keys_agree(const MolecularState& a, const MolecularState& b, const MatchSpec& spec) {
  for (const auto& key : spec.match_keys) {
    auto va = find_quantum_number(a.quantum_numbers, key);
    auto vb = find_quantum_number(b.quantum_numbers, key);
    if (!va || !vb || *va != *vb) return false;
  }
  return true;
}

std::string join(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
  return out;
}

void expand_global(Origin& origin, const XsamsDocument& doc) {
  for (auto& v : origin.versions) {
    if (!v.global) continue;
    v.global = false;
    for (const auto& a : doc.atoms) {
      v.species_refs.push_back(a.species_id);
      for (const auto& s : a.states) v.state_refs.push_back(s.state_id);
    }
    for (const auto& m : doc.molecules) {
      v.species_refs.push_back(m.species_id);
      for (const auto& s : m.states) v.state_refs.push_back(s.state_id);
    }
    for (const auto& p : doc.radiative) v.process_refs.push_back(p.id);
    for (const auto& p : doc.collisions) v.process_refs.push_back(p.id);
    for (const auto& s : doc.sources) v.source_refs.push_back(s.source_id);
  }
}

// Species and state identifiers declared by a document.
std::set<std::string> owned_ids(const XsamsDocument& doc) {
  std::set<std::string> ids;
  for (const auto& a : doc.atoms) {
    ids.insert(a.species_id);
    for (const auto& s : a.states) ids.insert(s.state_id);
  }
  for (const auto& m : doc.molecules) {
    ids.insert(m.species_id);
    for (const auto& s : m.states) ids.insert(s.state_id);
  }
  return ids;
}

}  // namespace

StateMatching crossmatch_states(const MoleculeSpecies& spectroscopic,
                                const MoleculeSpecies& collisional, const MatchSpec& spec) {
  if (spec.match_keys.empty()) {
    throw Error(ErrorCode::InvalidInput, "match_keys", "at least one quantum number is required");
  }
  if (!same_species(spectroscopic, collisional)) {
    throw Error(ErrorCode::SpeciesMismatch, collisional.species_id,
                "does not pair with " + spectroscopic.species_id);
  }
  StateMatching m;
  std::map<std::string, std::string> claimed;  // spectroscopic -> collisional
  for (const auto& c : collisional.states) {
    if (c.auxiliary) continue;
    std::vector<std::string> candidates;
    for (const auto& s : spectroscopic.states) {
      if (!s.auxiliary && keys_agree(c, s, spec)) candidates.push_back(s.state_id);
    }
    if (candidates.size() > 1) {
      throw Error(ErrorCode::AmbiguousMatch, c.state_id, "candidates " + join(candidates));
    }
    if (candidates.empty()) {
      m.unmatched_collisional.push_back(c.state_id);
      continue;
    }
    auto [it, inserted] = claimed.emplace(candidates.front(), c.state_id);
    if (!inserted) {
      throw Error(ErrorCode::AmbiguousMatch, candidates.front(),
                  "claimed by " + it->second + " and " + c.state_id);
    }
    m.pairs.emplace_back(c.state_id, candidates.front());
  }
  for (const auto& s : spectroscopic.states) {
    if (!s.auxiliary && !claimed.count(s.state_id)) m.unmatched_spectroscopic.push_back(s.state_id);
  }
  return m;
}

XsamsDocument merge(const XsamsDocument& spectroscopic, const XsamsDocument& collisional,
                    const MatchSpec& spec, const ToolConfig& tool, const Timestamp& now) {
  for (const auto* doc : {&spectroscopic, &collisional}) {
    if (doc->origins.size() != 1) {
      throw Error(ErrorCode::MultipleRootOrigins, doc == &spectroscopic ? "spectroscopic" : "collisional",
                  "expected exactly one root Origin, found " + std::to_string(doc->origins.size()));
    }
  }
  auto spec_ids = collect_identifiers(spectroscopic);
  auto coll_ids = collect_identifiers(collisional);
  for (const auto& [id, kind] : coll_ids) {
    if (spec_ids.count(id)) {
      throw Error(ErrorCode::DuplicateIdentifier, id, "declared by both inputs");
    }
  }

  // Species and state rewrites for collisional molecules that also exist on
  // the spectroscopic side.
  std::map<std::string, std::string> species_map;
  std::map<std::string, std::string> state_map;
  std::set<std::string> dropped;  // replaced collisional species and states
  std::vector<const MoleculeSpecies*> kept_molecules;
  for (const auto& c : collisional.molecules) {
    auto partner = std::find_if(spectroscopic.molecules.begin(), spectroscopic.molecules.end(),
                                [&](const MoleculeSpecies& s) { return same_species(s, c); });
    if (partner == spectroscopic.molecules.end()) {
      kept_molecules.push_back(&c);
      continue;
    }
    auto matching = crossmatch_states(*partner, c, spec);
    species_map[c.species_id] = partner->species_id;
    dropped.insert(c.species_id);
    for (const auto& s : c.states) dropped.insert(s.state_id);
    for (const auto& [from, to] : matching.pairs) state_map[from] = to;
  }

  auto rewrite_species = [&](std::string& id) {
    if (auto it = species_map.find(id); it != species_map.end()) id = it->second;
  };
  auto rewrite_state = [&](std::string& id, const std::string& process) {
    if (id.empty()) return;
    if (auto it = state_map.find(id); it != state_map.end()) {
      id = it->second;
    } else if (dropped.count(id)) {
      throw Error(ErrorCode::UnmatchedReferencedState, id,
                  "referenced by " + process + " but has no spectroscopic counterpart");
    }
  };

  XsamsDocument out;
  out.root_attributes = spectroscopic.root_attributes;
  for (const auto& a : collisional.root_attributes) {
    bool present = std::any_of(out.root_attributes.begin(), out.root_attributes.end(),
                               [&](const xml::Attribute& b) { return b.name == a.name; });
    if (!present) out.root_attributes.push_back(a);
  }
  out.atoms = spectroscopic.atoms;
  out.atoms.insert(out.atoms.end(), collisional.atoms.begin(), collisional.atoms.end());
  out.molecules = spectroscopic.molecules;
  for (const auto* m : kept_molecules) out.molecules.push_back(*m);

  auto spec_owned = owned_ids(spectroscopic);
  auto coll_owned = owned_ids(collisional);
  std::set<std::string> spanning;
  // A collisional process now touching spectroscopic elements belongs to
  // neither input origin alone.
  auto spans = [&](const std::vector<std::string>& refs) {
    bool spec_side = false, coll_side = false;
    for (const auto& r : refs) {
      spec_side |= spec_owned.count(r) > 0;
      coll_side |= coll_owned.count(r) > 0 && !dropped.count(r);
    }
    return spec_side && coll_side;
  };

  out.radiative = spectroscopic.radiative;
  for (auto t : collisional.radiative) {
    auto before = t;
    rewrite_species(t.species_ref);
    rewrite_state(t.upper_state_ref, t.id);
    rewrite_state(t.lower_state_ref, t.id);
    if (!(before == t) || spans({t.species_ref, t.upper_state_ref, t.lower_state_ref})) {
      spanning.insert(t.id);
    }
    out.radiative.push_back(std::move(t));
  }
  out.collisions = spectroscopic.collisions;
  for (auto t : collisional.collisions) {
    std::vector<std::string> refs;
    bool rewritten = false;
    for (auto* side : {&t.reactants, &t.products}) {
      for (auto& r : *side) {
        auto before = r;
        rewrite_species(r.species_ref);
        rewrite_state(r.state_ref, t.id);
        rewritten |= !(before == r);
        refs.push_back(r.species_ref);
        if (!r.state_ref.empty()) refs.push_back(r.state_ref);
      }
    }
    if (rewritten || spans(refs)) spanning.insert(t.id);
    out.collisions.push_back(std::move(t));
  }
  out.sources = collisional.sources;
  out.sources.insert(out.sources.end(), spectroscopic.sources.begin(), spectroscopic.sources.end());

  std::vector<std::string> comments;
  for (const auto* doc : {&spectroscopic, &collisional}) {
    if (doc->comments && !doc->comments->empty()) comments.push_back(*doc->comments);
  }
  std::string marker = tool.name;
  std::transform(marker.begin(), marker.end(), marker.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  comments.push_back("Data merged by " + marker + ".");
  std::string joined;
  for (const auto& c : comments) joined += (joined.empty() ? "" : "\n") + c;
  out.comments = joined;
  out.unmodeled = spectroscopic.unmodeled;
  out.unmodeled.insert(out.unmodeled.end(), collisional.unmodeled.begin(), collisional.unmodeled.end());

  // Nested origins keep only what is still wholly theirs.
  Origin spec_origin = spectroscopic.origins.front();
  Origin coll_origin = collisional.origins.front();
  expand_global(spec_origin, spectroscopic);
  expand_global(coll_origin, collisional);
  std::set<std::string> taken(dropped);
  taken.insert(spanning.begin(), spanning.end());
  for (const auto& s : out.sources) taken.insert(s.source_id);
  std::optional<Timestamp> earliest;
  std::set<std::string> version_ids;
  for (auto* origin : {&spec_origin, &coll_origin}) {
    std::vector<Origin*> stack{origin};
    while (!stack.empty()) {
      auto* o = stack.back();
      stack.pop_back();
      for (auto& v : o->versions) {
        for (auto* list : {&v.species_refs, &v.state_refs, &v.process_refs, &v.source_refs}) {
          std::erase_if(*list, [&](const std::string& id) { return taken.count(id) > 0; });
        }
        version_ids.insert(v.version_id);
        auto t = v.timestamp.utc_seconds();
        if (t && (!earliest || *t < *earliest->utc_seconds())) earliest = v.timestamp;
      }
      for (auto& sub : o->sub_origins) stack.push_back(&sub);
    }
  }

  Version root_version;
  int counter = 1;
  auto candidate = [&] { return "VERMER" + std::to_string(counter); };
  while (version_ids.count(candidate()) || spec_ids.count(candidate()) || coll_ids.count(candidate())) {
    ++counter;
  }
  root_version.version_id = candidate();
  root_version.timestamp = earliest ? *earliest : now;
  for (const auto& t : out.radiative) {
    if (spanning.count(t.id)) root_version.process_refs.push_back(t.id);
  }
  for (const auto& t : out.collisions) {
    if (spanning.count(t.id)) root_version.process_refs.push_back(t.id);
  }
  for (const auto& s : out.sources) root_version.source_refs.push_back(s.source_id);

  Origin root;
  root.kind = OriginKind::Other;
  root.timestamp = now;
  root.versions.push_back(std::move(root_version));
  root.homepage_url = tool.homepage_url;
  root.name = tool.name;
  root.comments = tool.comment;
  root.origin_identifier = tool.origin_identifier;
  root.sub_origins.push_back(std::move(spec_origin));
  root.sub_origins.push_back(std::move(coll_origin));
  out.origins.push_back(std::move(root));
  return out;
}

}  // namespace xsams::merge

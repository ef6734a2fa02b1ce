#pragma once

// In-memory model of a provenance-extended XSAMS document.
//
// Only the part of XSAMS needed to carry species, states, processes and
// sources is typed. Everything else is kept as verbatim xml::Element subtrees
// so a document survives a read/write cycle without losing content.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "xsams/xml.hpp"

namespace xsams {

// Decimal literal kept as written ("7.20360334988e-08" stays byte-identical).
struct Decimal {
  std::string text;

  double value() const;  // throws Error(InvalidInput) when not numeric
  std::optional<double> try_value() const;

  friend bool operator==(const Decimal&, const Decimal&) = default;
};

struct Quantity {
  Decimal value;
  std::string units;

  friend bool operator==(const Quantity&, const Quantity&) = default;
};

// ISO-8601 instant with its original offset text; never normalized.
struct Timestamp {
  std::string text;

  // Seconds since the Unix epoch (UTC), nullopt when malformed.
  std::optional<std::int64_t> utc_seconds() const;
  // Calendar date as written in the local offset ("2015-12-03").
  std::string date() const;
  bool valid() const { return utc_seconds().has_value(); }

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

Timestamp now_utc();

// --- provenance ------------------------------------------------------------

struct Version {
  std::string version_id;
  bool global = false;
  Timestamp timestamp;  // publication of this data version
  std::vector<std::string> species_refs;
  std::vector<std::string> state_refs;
  std::vector<std::string> process_refs;
  std::vector<std::string> source_refs;

  bool empty() const {
    return species_refs.empty() && state_refs.empty() &&
           process_refs.empty() && source_refs.empty();
  }
  friend bool operator==(const Version&, const Version&) = default;
};

enum class OriginKind { Node, Processor, Other };

std::string_view to_xsi_type(OriginKind kind);
std::optional<OriginKind> origin_kind_from_xsi_type(std::string_view type);

struct Origin {
  OriginKind kind = OriginKind::Other;
  Timestamp timestamp;  // extraction time
  // Normally exactly one; a node answering from several internal releases
  // emits one per release.
  std::vector<Version> versions;
  std::string homepage_url;
  std::string name;
  std::optional<std::string> comments;
  std::optional<std::string> query;
  std::optional<std::string> origin_identifier;
  std::vector<Origin> sub_origins;

  friend bool operator==(const Origin&, const Origin&) = default;
};

// --- bibliography ----------------------------------------------------------

struct Source {
  std::string source_id;
  std::string category;
  std::optional<std::string> source_name;
  std::optional<std::string> year;  // kept as text, validated as 4 digits
  std::vector<std::string> authors;
  std::optional<std::string> title;
  std::optional<std::string> volume;
  std::optional<std::string> page_begin;
  std::optional<std::string> page_end;
  std::optional<std::string> uri;
  std::optional<std::string> doi;
  std::optional<std::string> production_date;
  std::optional<std::string> comments;
  std::vector<xml::Element> unmodeled;

  // Database sources stamped with a production date describe the extraction
  // itself (the node's self-reference), not a publication.
  bool is_self_reference() const {
    return category == "database" && production_date.has_value();
  }
  friend bool operator==(const Source&, const Source&) = default;
};

// --- species and states ----------------------------------------------------

struct LsTerm {
  std::string l_value;
  std::string l_symbol;
  std::string s;

  friend bool operator==(const LsTerm&, const LsTerm&) = default;
};

struct AtomicState {
  std::string state_id;
  std::optional<std::string> comments;
  std::vector<std::string> source_refs;
  std::optional<Quantity> energy;
  std::optional<Decimal> total_angular_momentum;
  std::optional<LsTerm> term;
  // AtomicComposition blocks richer than a single LS term.
  std::optional<xml::Element> composition;
  std::vector<xml::Element> unmodeled;

  friend bool operator==(const AtomicState&, const AtomicState&) = default;
};

struct AtomSpecies {
  std::string species_id;
  std::string element_symbol;
  int nuclear_charge = 0;
  std::optional<int> mass_number;
  std::optional<Quantity> mass;
  int ion_charge = 0;
  std::string inchikey;
  std::vector<AtomicState> states;
  std::vector<xml::Element> unmodeled;

  friend bool operator==(const AtomSpecies&, const AtomSpecies&) = default;
};

struct PartitionFunction {
  std::string t_units = "K";
  std::vector<std::string> temperatures;
  std::vector<std::string> values;

  friend bool operator==(const PartitionFunction&, const PartitionFunction&) = default;
};

// Ordered quantum-number list; names are unprefixed ("J", "v").
using QuantumNumbers = std::vector<std::pair<std::string, std::string>>;

std::optional<std::string> find_quantum_number(const QuantumNumbers& qns,
                                               std::string_view name);

struct MolecularState {
  std::string state_id;
  bool auxiliary = false;
  std::optional<Decimal> energy_value;
  std::string energy_units;
  std::optional<std::string> energy_origin_ref;
  std::optional<int> total_statistical_weight;
  std::optional<int> nuclear_statistical_weight;
  std::vector<std::string> source_refs;
  std::optional<std::string> description;
  std::string case_id;
  std::string case_prefix;  // namespace prefix of the case elements
  std::vector<xml::Attribute> case_attributes;  // everything but caseID
  QuantumNumbers quantum_numbers;
  std::vector<xml::Element> unmodeled;

  friend bool operator==(const MolecularState&, const MolecularState&) = default;
};

struct MoleculeSpecies {
  std::string species_id;
  std::string ordinary_formula;
  std::string stoichiometric_formula;
  std::string chemical_name;
  std::string inchi;
  std::string inchikey;
  std::string vamdc_species_id;
  std::optional<xml::Element> structure;
  std::optional<PartitionFunction> partition_function;
  std::optional<Quantity> molecular_weight;
  std::optional<std::string> comment;
  std::vector<MolecularState> states;
  std::vector<xml::Element> unmodeled;

  friend bool operator==(const MoleculeSpecies&, const MoleculeSpecies&) = default;
};

// --- processes ---------------------------------------------------------------

struct RadiativeTransition {
  std::string id;
  std::string process_kind;
  std::vector<std::string> source_refs;
  std::optional<Quantity> frequency;
  std::optional<Decimal> frequency_accuracy;
  std::string upper_state_ref;
  std::string lower_state_ref;
  std::string species_ref;
  std::optional<Quantity> probability_a;
  std::optional<Quantity> idealised_intensity;
  std::optional<std::string> multipole;
  std::string process_class_code;
  std::vector<xml::Element> unmodeled;

  friend bool operator==(const RadiativeTransition&, const RadiativeTransition&) = default;
};

struct SpeciesStateRef {
  std::string species_ref;
  std::string state_ref;

  friend bool operator==(const SpeciesStateRef&, const SpeciesStateRef&) = default;
};

struct DataSet {
  std::string description;
  std::optional<std::string> comments;
  std::string x_units;
  std::vector<std::string> x_values;
  std::string y_units;
  std::vector<std::string> y_values;

  friend bool operator==(const DataSet&, const DataSet&) = default;
};

struct CollisionalTransition {
  std::string id;
  std::optional<std::string> comments;
  std::vector<std::string> source_refs;
  std::string process_class_code;
  std::vector<SpeciesStateRef> reactants;
  std::vector<SpeciesStateRef> products;
  std::vector<DataSet> datasets;
  std::vector<xml::Element> unmodeled;

  friend bool operator==(const CollisionalTransition&, const CollisionalTransition&) = default;
};

// --- document ----------------------------------------------------------------

struct XsamsDocument {
  // Root element attributes (namespace declarations, schemaLocation) in
  // input order. Empty for documents built in memory; the writer then uses
  // its default declarations.
  std::vector<xml::Attribute> root_attributes;
  std::vector<Origin> origins;
  std::vector<AtomSpecies> atoms;
  std::vector<MoleculeSpecies> molecules;
  std::vector<RadiativeTransition> radiative;
  std::vector<CollisionalTransition> collisions;
  std::vector<Source> sources;
  std::optional<std::string> comments;
  std::vector<xml::Element> unmodeled;

  friend bool operator==(const XsamsDocument&, const XsamsDocument&) = default;
};

// --- identifiers ---------------------------------------------------------------

enum class ElementKind { Species, State, Process, Source, Version };

std::string_view to_string(ElementKind kind);

// Flat, document-wide identifier table. Throws DuplicateIdentifier.
std::map<std::string, ElementKind> collect_identifiers(const XsamsDocument& doc);

using ElementRef =
    std::variant<const AtomSpecies*, const MoleculeSpecies*, const AtomicState*,
                 const MolecularState*, const RadiativeTransition*,
                 const CollisionalTransition*, const Source*, const Version*>;

// Throws UnresolvedReference.
ElementRef resolve_ref(const XsamsDocument& doc, std::string_view id);

// Identifier -> owning version id. Throws MultipleVersionMembership.
std::map<std::string, std::string> version_membership(const XsamsDocument& doc);

// Every data identifier (species, states, processes, sources) in document
// order.
std::vector<std::string> data_identifiers(const XsamsDocument& doc);

// Pre-order walk over the origin tree.
template <class Fn>
void for_each_origin(const std::vector<Origin>& origins, Fn&& fn) {
  for (const auto& o : origins) {
    fn(o);
    for_each_origin(o.sub_origins, fn);
  }
}

template <class Fn>
void for_each_origin(std::vector<Origin>& origins, Fn&& fn) {
  for (auto& o : origins) {
    fn(o);
    for_each_origin(o.sub_origins, fn);
  }
}

std::vector<const Version*> all_versions(const XsamsDocument& doc);
std::size_t origin_tree_depth(const std::vector<Origin>& origins);

// Identifier of the species owning a state, nullopt when unknown.
std::optional<std::string> species_of_state(const XsamsDocument& doc,
                                            std::string_view state_id);

}  // namespace xsams

#include "xsams/io.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "xsams/error.hpp"
#include "xsams/sha256.hpp"

namespace xsams {

namespace {

using xml::Attribute;
using xml::Element;

constexpr std::string_view kTimestampSentinel = "EXTRACTION-TIMESTAMP";
constexpr std::string_view kProductionDateSentinel = "EXTRACTION-DATE";
constexpr std::string_view kProductionYearSentinel = "EXTRACTION-YEAR";

std::string trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += items[i];
  }
  return out;
}

bool parse_bool(std::string_view s) {
  auto t = trim(s);
  return t == "true" || t == "1";
}

// ---------------------------------------------------------------- reading

class DocumentReader {
 public:
  explicit DocumentReader(ParseDiagnostics& diag) : diag_(diag) {}

  XsamsDocument read(const Element& root) {
    if (xml::local_name(root.name) != "XSAMSData") {
      throw Error(ErrorCode::XmlSyntax, xml::to_string(root.location),
                  "root element must be XSAMSData, found <" + root.name + ">");
    }
    auto pfx = xml::prefix(root.name);
    std::string ns_attr = pfx.empty() ? "xmlns" : "xmlns:" + std::string(pfx);
    auto ns = root.attribute(ns_attr);
    if (!ns || *ns != kXsamsNamespace) {
      throw Error(ErrorCode::XmlSyntax, xml::to_string(root.location),
                  "XSAMSData must be in namespace " + std::string(kXsamsNamespace));
    }
    XsamsDocument doc;
    doc.root_attributes = root.attributes;
    for (const auto& c : root.children) {
      auto name = xml::local_name(c.name);
      if (name == "Origin") {
        doc.origins.push_back(origin(c));
      } else if (name == "Species") {
        species(c, doc);
      } else if (name == "Processes") {
        processes(c, doc);
      } else if (name == "Sources") {
        for (const auto& s : c.children) {
          if (xml::local_name(s.name) == "Source") {
            doc.sources.push_back(source(s));
          } else {
            unexpected(s, "Sources");
          }
        }
      } else if (name == "Comments") {
        doc.comments = trim(c.text);
      } else {
        keep(c, doc.unmodeled);
      }
    }
    return doc;
  }

 private:
  ParseDiagnostics& diag_;

  void keep(const Element& e, std::vector<Element>& into) {
    diag_.warnings.push_back(
        {e.location, "unmodeled element <" + e.name + "> preserved verbatim"});
    into.push_back(e);
  }

  void unexpected(const Element& e, std::string_view parent) {
    diag_.warnings.push_back({e.location, "unexpected element <" + e.name +
                                              "> inside <" + std::string(parent) +
                                              "> ignored"});
  }

  static const Element* child(const Element& e, std::string_view local) {
    for (const auto& c : e.children) {
      if (xml::local_name(c.name) == local) return &c;
    }
    return nullptr;
  }

  static std::optional<std::string> child_text(const Element& e,
                                               std::string_view local) {
    if (const auto* c = child(e, local)) return trim(c->text);
    return std::nullopt;
  }

  static std::string require_attr(const Element& e, std::string_view name) {
    auto v = e.attribute(name);
    if (!v) {
      throw Error(ErrorCode::MissingRequiredField, std::string(xml::local_name(e.name)),
                  "missing attribute " + std::string(name) + " at " +
                      xml::to_string(e.location));
    }
    return *v;
  }

  static int to_int(const Element& e, std::string_view what) {
    auto t = trim(e.text);
    int v = 0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc{} || r.ptr != t.data() + t.size()) {
      throw Error(ErrorCode::InvalidInput, std::string(what),
                  "expected an integer at " + xml::to_string(e.location));
    }
    return v;
  }

  static std::optional<Quantity> value_quantity(const Element* parent) {
    if (!parent) return std::nullopt;
    const auto* v = child(*parent, "Value");
    if (!v) return std::nullopt;
    return Quantity{Decimal{trim(v->text)}, v->attribute("units").value_or("")};
  }

  Version version(const Element& e) {
    Version v;
    v.version_id = require_attr(e, "versionID");
    v.global = parse_bool(e.attribute("global").value_or("false"));
    v.timestamp.text = require_attr(e, "timestamp");
    for (const auto& c : e.children) {
      auto name = xml::local_name(c.name);
      auto id = trim(c.text);
      if (name == "SpeciesRef") v.species_refs.push_back(id);
      else if (name == "StateRef") v.state_refs.push_back(id);
      else if (name == "ProcessRef") v.process_refs.push_back(id);
      else if (name == "SourceRef") v.source_refs.push_back(id);
      else unexpected(c, "Version");
    }
    return v;
  }

  Origin origin(const Element& e) {
    auto type = e.attribute("xsi:type").value_or("");
    auto kind = origin_kind_from_xsi_type(type);
    if (!kind) {
      throw Error(ErrorCode::UnknownOriginKind, type,
                  "Origin at " + xml::to_string(e.location) +
                      " has no recognised xsi:type");
    }
    Origin o;
    o.kind = *kind;
    bool has_timestamp = false, has_homepage = false, has_name = false;
    for (const auto& c : e.children) {
      auto name = xml::local_name(c.name);
      if (name == "Timestamp") {
        o.timestamp.text = trim(c.text);
        has_timestamp = true;
      } else if (name == "Version") {
        o.versions.push_back(version(c));
      } else if (name == "HomepageUrl" || name == "HomepageURL") {
        o.homepage_url = trim(c.text);
        has_homepage = true;
      } else if (name == "Name") {
        o.name = trim(c.text);
        has_name = true;
      } else if (name == "Comments") {
        o.comments = trim(c.text);
      } else if (name == "Query") {
        o.query = trim(c.text);
      } else if (name == "OriginIdentifier") {
        o.origin_identifier = trim(c.text);
      } else if (name == "Origin") {
        o.sub_origins.push_back(origin(c));
      } else {
        unexpected(c, "Origin");
      }
    }
    auto missing = [&](std::string_view field) {
      throw Error(ErrorCode::MissingRequiredField, "Origin",
                  std::string(to_xsi_type(o.kind)) + " at " +
                      xml::to_string(e.location) + " lacks " + std::string(field));
    };
    if (!has_timestamp) missing("Timestamp");
    if (o.versions.empty()) missing("Version");
    if (!has_homepage) missing("HomepageUrl");
    if (!has_name) missing("Name");
    if (o.kind == OriginKind::Node && !o.query) missing("Query");
    if (o.kind != OriginKind::Other && !o.origin_identifier) missing("OriginIdentifier");
    return o;
  }

  // -- species

  void species(const Element& e, XsamsDocument& doc) {
    for (const auto& c : e.children) {
      auto name = xml::local_name(c.name);
      if (name == "Atoms") {
        for (const auto& a : c.children) {
          if (xml::local_name(a.name) == "Atom") atom(a, doc.atoms);
          else unexpected(a, "Atoms");
        }
      } else if (name == "Molecules") {
        for (const auto& m : c.children) {
          if (xml::local_name(m.name) == "Molecule") doc.molecules.push_back(molecule(m));
          else unexpected(m, "Molecules");
        }
      } else {
        keep(c, doc.unmodeled);
      }
    }
  }

  // One AtomSpecies per Ion; element and isotope data are copied onto each.
  void atom(const Element& e, std::vector<AtomSpecies>& out) {
    AtomSpecies base;
    std::vector<Element> extra;
    if (const auto* ce = child(e, "ChemicalElement")) {
      if (const auto* z = child(*ce, "NuclearCharge")) base.nuclear_charge = to_int(*z, "NuclearCharge");
      base.element_symbol = child_text(*ce, "ElementSymbol").value_or("");
    }
    for (const auto& c : e.children) {
      auto name = xml::local_name(c.name);
      if (name == "ChemicalElement" || name == "Isotope") continue;
      keep(c, extra);
    }
    for (const auto& iso : e.children) {
      if (xml::local_name(iso.name) != "Isotope") continue;
      AtomSpecies isotope = base;
      isotope.unmodeled = extra;
      if (const auto* params = child(iso, "IsotopeParameters")) {
        if (const auto* mn = child(*params, "MassNumber")) isotope.mass_number = to_int(*mn, "MassNumber");
        isotope.mass = value_quantity(child(*params, "Mass"));
      }
      for (const auto& ion : iso.children) {
        auto name = xml::local_name(ion.name);
        if (name == "IsotopeParameters") continue;
        if (name != "Ion") {
          keep(ion, isotope.unmodeled);
          continue;
        }
        AtomSpecies s = isotope;
        s.species_id = require_attr(ion, "speciesID");
        for (const auto& c : ion.children) {
          auto cn = xml::local_name(c.name);
          if (cn == "IonCharge") s.ion_charge = to_int(c, "IonCharge");
          else if (cn == "AtomicState") s.states.push_back(atomic_state(c));
          else if (cn == "InChIKey") s.inchikey = trim(c.text);
          else keep(c, s.unmodeled);
        }
        out.push_back(std::move(s));
      }
    }
  }

  static std::optional<LsTerm> simple_ls_term(const Element& composition) {
    // AtomicComposition/Component/Term/LS/{L/{Value,Symbol},S} and nothing else.
    auto only = [](const Element& e, std::string_view name) -> const Element* {
      if (e.children.size() != 1 || !e.attributes.empty()) return nullptr;
      return xml::local_name(e.children[0].name) == name ? &e.children[0] : nullptr;
    };
    if (!composition.attributes.empty()) return std::nullopt;
    const auto* comp = only(composition, "Component");
    const auto* term = comp ? only(*comp, "Term") : nullptr;
    const auto* ls = term ? only(*term, "LS") : nullptr;
    if (!ls || !ls->attributes.empty() || ls->children.size() != 2) return std::nullopt;
    const auto& l = ls->children[0];
    const auto& s = ls->children[1];
    if (xml::local_name(l.name) != "L" || xml::local_name(s.name) != "S" ||
        !s.children.empty() || l.children.size() != 2 || !l.attributes.empty() ||
        !s.attributes.empty()) {
      return std::nullopt;
    }
    const auto& lv = l.children[0];
    const auto& ls_sym = l.children[1];
    if (xml::local_name(lv.name) != "Value" || xml::local_name(ls_sym.name) != "Symbol" ||
        !lv.children.empty() || !ls_sym.children.empty() || !lv.attributes.empty() ||
        !ls_sym.attributes.empty()) {
      return std::nullopt;
    }
    return LsTerm{trim(lv.text), trim(ls_sym.text), trim(s.text)};
  }

  AtomicState atomic_state(const Element& e) {
    AtomicState s;
    s.state_id = require_attr(e, "stateID");
    for (const auto& c : e.children) {
      auto name = xml::local_name(c.name);
      if (name == "Comments") {
        s.comments = trim(c.text);
      } else if (name == "SourceRef") {
        s.source_refs.push_back(trim(c.text));
      } else if (name == "AtomicNumericalData" && c.children.size() == 1 &&
                 xml::local_name(c.children[0].name) == "StateEnergy" &&
                 value_quantity(&c.children[0])) {
        s.energy = value_quantity(&c.children[0]);
      } else if (name == "AtomicQuantumNumbers" && c.children.size() == 1 &&
                 xml::local_name(c.children[0].name) == "TotalAngularMomentum") {
        s.total_angular_momentum = Decimal{trim(c.children[0].text)};
      } else if (name == "AtomicComposition") {
        if (auto term = simple_ls_term(c)) s.term = term;
        else s.composition = c;
      } else {
        keep(c, s.unmodeled);
      }
    }
    return s;
  }

  static std::vector<std::string> data_list(const Element* axis) {
    if (!axis) return {};
    if (const auto* dl = child(*axis, "DataList")) return split_list(dl->text);
    return {};
  }

  MoleculeSpecies molecule(const Element& e) {
    MoleculeSpecies m;
    m.species_id = require_attr(e, "speciesID");
    for (const auto& c : e.children) {
      auto name = xml::local_name(c.name);
      if (name == "MolecularChemicalSpecies") {
        chemical_species(c, m);
      } else if (name == "MolecularState") {
        m.states.push_back(molecular_state(c));
      } else {
        keep(c, m.unmodeled);
      }
    }
    return m;
  }

  void chemical_species(const Element& e, MoleculeSpecies& m) {
    for (const auto& c : e.children) {
      auto name = xml::local_name(c.name);
      if (name == "OrdinaryStructuralFormula") {
        m.ordinary_formula = child_text(c, "Value").value_or(trim(c.text));
      } else if (name == "StoichiometricFormula") {
        m.stoichiometric_formula = trim(c.text);
      } else if (name == "ChemicalName") {
        m.chemical_name = child_text(c, "Value").value_or(trim(c.text));
      } else if (name == "InChI") {
        m.inchi = trim(c.text);
      } else if (name == "InChIKey") {
        m.inchikey = trim(c.text);
      } else if (name == "VAMDCSpeciesID") {
        m.vamdc_species_id = trim(c.text);
      } else if (name == "MoleculeStructure") {
        m.structure = c;
      } else if (name == "PartitionFunction") {
        PartitionFunction pf;
        if (const auto* t = child(c, "T")) pf.t_units = t->attribute("units").value_or("K");
        pf.temperatures = data_list(child(c, "T"));
        pf.values = data_list(child(c, "Q"));
        m.partition_function = std::move(pf);
      } else if (name == "StableMolecularProperties" &&
                 child(c, "MolecularWeight") && c.children.size() == 1) {
        m.molecular_weight = value_quantity(child(c, "MolecularWeight"));
      } else if (name == "Comment") {
        m.comment = trim(c.text);
      } else {
        keep(c, m.unmodeled);
      }
    }
  }

  MolecularState molecular_state(const Element& e) {
    MolecularState s;
    s.state_id = require_attr(e, "stateID");
    auto aux = e.attribute("auxillary");
    if (!aux) aux = e.attribute("auxiliary");
    s.auxiliary = aux && parse_bool(*aux);
    for (const auto& c : e.children) {
      auto name = xml::local_name(c.name);
      if (name == "SourceRef") {
        s.source_refs.push_back(trim(c.text));
      } else if (name == "Description") {
        s.description = trim(c.text);
      } else if (name == "MolecularStateCharacterisation") {
        for (const auto& f : c.children) {
          auto fn = xml::local_name(f.name);
          if (fn == "StateEnergy") {
            s.energy_origin_ref = f.attribute("energyOrigin");
            if (auto q = value_quantity(&f)) {
              s.energy_value = q->value;
              s.energy_units = q->units;
            }
          } else if (fn == "TotalStatisticalWeight") {
            s.total_statistical_weight = to_int(f, "TotalStatisticalWeight");
          } else if (fn == "NuclearStatisticalWeight") {
            s.nuclear_statistical_weight = to_int(f, "NuclearStatisticalWeight");
          } else {
            unexpected(f, "MolecularStateCharacterisation");
          }
        }
      } else if (name == "Case") {
        for (const auto& a : c.attributes) {
          if (a.name == "caseID") s.case_id = a.value;
          else s.case_attributes.push_back(a);
        }
        for (const auto& qns : c.children) {
          if (xml::local_name(qns.name) != "QNs") {
            unexpected(qns, "Case");
            continue;
          }
          s.case_prefix = std::string(xml::prefix(qns.name));
          for (const auto& qn : qns.children) {
            s.quantum_numbers.emplace_back(std::string(xml::local_name(qn.name)),
                                           trim(qn.text));
          }
        }
      } else {
        keep(c, s.unmodeled);
      }
    }
    return s;
  }

  // -- processes

  void processes(const Element& e, XsamsDocument& doc) {
    for (const auto& c : e.children) {
      auto name = xml::local_name(c.name);
      if (name == "Radiative") {
        for (const auto& t : c.children) {
          if (xml::local_name(t.name) == "RadiativeTransition") doc.radiative.push_back(radiative(t));
          else unexpected(t, "Radiative");
        }
      } else if (name == "Collisions") {
        for (const auto& t : c.children) {
          if (xml::local_name(t.name) == "CollisionalTransition") doc.collisions.push_back(collision(t));
          else unexpected(t, "Collisions");
        }
      } else {
        keep(c, doc.unmodeled);
      }
    }
  }

  RadiativeTransition radiative(const Element& e) {
    RadiativeTransition t;
    t.id = require_attr(e, "id");
    t.process_kind = e.attribute("process").value_or("");
    for (const auto& c : e.children) {
      auto name = xml::local_name(c.name);
      if (name == "SourceRef") {
        t.source_refs.push_back(trim(c.text));
      } else if (name == "EnergyWavelength" && c.children.size() == 1 &&
                 child(c, "Frequency")) {
        const auto* f = child(c, "Frequency");
        t.frequency = value_quantity(f);
        if (auto acc = child_text(*f, "Accuracy")) t.frequency_accuracy = Decimal{*acc};
      } else if (name == "UpperStateRef") {
        t.upper_state_ref = trim(c.text);
      } else if (name == "LowerStateRef") {
        t.lower_state_ref = trim(c.text);
      } else if (name == "SpeciesRef") {
        t.species_ref = trim(c.text);
      } else if (name == "Probability") {
        for (const auto& p : c.children) {
          auto pn = xml::local_name(p.name);
          if (pn == "TransitionProbabilityA") t.probability_a = value_quantity(&p);
          else if (pn == "IdealisedIntensity") t.idealised_intensity = value_quantity(&p);
          else if (pn == "Multipole") t.multipole = trim(p.text);
          else unexpected(p, "Probability");
        }
      } else if (name == "ProcessClass") {
        t.process_class_code = child_text(c, "Code").value_or("");
      } else {
        keep(c, t.unmodeled);
      }
    }
    return t;
  }

  SpeciesStateRef species_state(const Element& e) {
    return {child_text(e, "SpeciesRef").value_or(""), child_text(e, "StateRef").value_or("")};
  }

  CollisionalTransition collision(const Element& e) {
    CollisionalTransition t;
    t.id = require_attr(e, "id");
    for (const auto& c : e.children) {
      auto name = xml::local_name(c.name);
      if (name == "Comments") {
        t.comments = trim(c.text);
      } else if (name == "SourceRef") {
        t.source_refs.push_back(trim(c.text));
      } else if (name == "ProcessClass") {
        t.process_class_code = child_text(c, "Code").value_or("");
      } else if (name == "Reactant") {
        t.reactants.push_back(species_state(c));
      } else if (name == "Product") {
        t.products.push_back(species_state(c));
      } else if (name == "DataSets") {
        for (const auto& ds : c.children) {
          if (xml::local_name(ds.name) != "DataSet") {
            unexpected(ds, "DataSets");
            continue;
          }
          DataSet d;
          d.description = ds.attribute("dataDescription").value_or("");
          if (const auto* tab = child(ds, "TabulatedData")) {
            d.comments = child_text(*tab, "Comments");
            if (const auto* x = child(*tab, "X")) d.x_units = x->attribute("units").value_or("");
            if (const auto* y = child(*tab, "Y")) d.y_units = y->attribute("units").value_or("");
            d.x_values = data_list(child(*tab, "X"));
            d.y_values = data_list(child(*tab, "Y"));
          }
          t.datasets.push_back(std::move(d));
        }
      } else {
        keep(c, t.unmodeled);
      }
    }
    return t;
  }

  // -- sources

  Source source(const Element& e) {
    Source s;
    s.source_id = require_attr(e, "sourceID");
    for (const auto& c : e.children) {
      auto name = xml::local_name(c.name);
      auto text = trim(c.text);
      if (name == "Category") s.category = text;
      else if (name == "SourceName") s.source_name = text;
      else if (name == "Year") s.year = text;
      else if (name == "Authors") {
        for (const auto& a : c.children) {
          if (auto n = child_text(a, "Name")) s.authors.push_back(*n);
        }
      } else if (name == "Title") s.title = text;
      else if (name == "Volume") s.volume = text;
      else if (name == "PageBegin") s.page_begin = text;
      else if (name == "PageEnd") s.page_end = text;
      else if (name == "UniformResourceIdentifier") s.uri = text;
      else if (name == "DigitalObjectIdentifier") s.doi = text;
      else if (name == "ProductionDate") s.production_date = text;
      else if (name == "Comments") s.comments = text;
      else keep(c, s.unmodeled);
    }
    return s;
  }
};

// ---------------------------------------------------------------- writing

Element leaf(std::string name, std::string text) {
  Element e;
  e.name = std::move(name);
  e.text = std::move(text);
  return e;
}

Element node(std::string name, std::vector<Element> children = {}) {
  Element e;
  e.name = std::move(name);
  e.children = std::move(children);
  return e;
}

void add_leaf(Element& parent, std::string name, const std::optional<std::string>& text) {
  if (text) parent.children.push_back(leaf(std::move(name), *text));
}

void add_nonempty(Element& parent, std::string name, const std::string& text) {
  if (!text.empty()) parent.children.push_back(leaf(std::move(name), text));
}

void add_refs(Element& parent, std::string_view name, const std::vector<std::string>& ids) {
  for (const auto& id : ids) parent.children.push_back(leaf(std::string(name), id));
}

Element value_element(const Quantity& q) {
  Element v = leaf("Value", q.value.text);
  if (!q.units.empty()) v.attributes.push_back({"units", q.units});
  return v;
}

Element data_axis(std::string name, const std::string& units,
                  const std::vector<std::string>& values) {
  Element axis = node(std::move(name), {leaf("DataList", join_list(values))});
  if (!units.empty()) axis.attributes.push_back({"units", units});
  return axis;
}

class DocumentWriter {
 public:
  explicit DocumentWriter(bool canonical) : canonical_(canonical) {}

  Element write(const XsamsDocument& doc) const {
    Element root = node("XSAMSData");
    root.attributes = doc.root_attributes;
    if (root.attributes.empty()) {
      root.attributes = {{"xmlns", std::string(kXsamsNamespace)},
                         {"xmlns:xsi", std::string(kXsiNamespace)},
                         {"xmlns:cml", "http://www.xml-cml.org/schema"},
                         {"xmlns:dcs", "http://vamdc.org/xml/xsams/1.0/cases/dcs"}};
    }
    for (const auto& o : doc.origins) root.children.push_back(origin(o));
    if (!doc.atoms.empty() || !doc.molecules.empty()) {
      Element species = node("Species");
      if (!doc.atoms.empty()) {
        Element atoms = node("Atoms");
        for (const auto& a : doc.atoms) atoms.children.push_back(atom(a));
        species.children.push_back(std::move(atoms));
      }
      if (!doc.molecules.empty()) {
        Element mols = node("Molecules");
        for (const auto& m : doc.molecules) mols.children.push_back(molecule(m));
        species.children.push_back(std::move(mols));
      }
      root.children.push_back(std::move(species));
    }
    if (!doc.radiative.empty() || !doc.collisions.empty()) {
      Element procs = node("Processes");
      if (!doc.radiative.empty()) {
        Element rad = node("Radiative");
        for (const auto& t : doc.radiative) rad.children.push_back(radiative(t));
        procs.children.push_back(std::move(rad));
      }
      if (!doc.collisions.empty()) {
        Element col = node("Collisions");
        for (const auto& t : doc.collisions) col.children.push_back(collision(t));
        procs.children.push_back(std::move(col));
      }
      root.children.push_back(std::move(procs));
    }
    for (const auto& u : doc.unmodeled) root.children.push_back(u);
    if (!doc.sources.empty()) {
      Element srcs = node("Sources");
      for (const auto& s : doc.sources) srcs.children.push_back(source(s));
      root.children.push_back(std::move(srcs));
    }
    add_leaf(root, "Comments", doc.comments);
    return root;
  }

 private:
  bool canonical_;

  static Element version(const Version& v) {
    Element e = node("Version");
    e.attributes = {{"versionID", v.version_id},
                    {"global", v.global ? "true" : "false"},
                    {"timestamp", v.timestamp.text}};
    add_refs(e, "SpeciesRef", v.species_refs);
    add_refs(e, "StateRef", v.state_refs);
    add_refs(e, "ProcessRef", v.process_refs);
    add_refs(e, "SourceRef", v.source_refs);
    return e;
  }

  Element origin(const Origin& o) const {
    Element e = node("Origin");
    e.attributes = {{"xsi:type", std::string(to_xsi_type(o.kind))}};
    e.children.push_back(
        leaf("Timestamp", canonical_ ? std::string(kTimestampSentinel) : o.timestamp.text));
    for (const auto& v : o.versions) e.children.push_back(version(v));
    e.children.push_back(leaf("HomepageUrl", o.homepage_url));
    e.children.push_back(leaf("Name", o.name));
    add_leaf(e, "Comments", o.comments);
    add_leaf(e, "Query", o.query);
    add_leaf(e, "OriginIdentifier", o.origin_identifier);
    for (const auto& sub : o.sub_origins) e.children.push_back(origin(sub));
    return e;
  }

  static Element atomic_state(const AtomicState& s) {
    Element e = node("AtomicState");
    e.attributes = {{"stateID", s.state_id}};
    add_leaf(e, "Comments", s.comments);
    add_refs(e, "SourceRef", s.source_refs);
    if (s.energy) {
      e.children.push_back(
          node("AtomicNumericalData", {node("StateEnergy", {value_element(*s.energy)})}));
    }
    if (s.total_angular_momentum) {
      e.children.push_back(node("AtomicQuantumNumbers",
                                {leaf("TotalAngularMomentum", s.total_angular_momentum->text)}));
    }
    if (s.term) {
      Element l = node("L", {leaf("Value", s.term->l_value), leaf("Symbol", s.term->l_symbol)});
      Element ls = node("LS", {std::move(l), leaf("S", s.term->s)});
      e.children.push_back(
          node("AtomicComposition", {node("Component", {node("Term", {std::move(ls)})})}));
    } else if (s.composition) {
      e.children.push_back(*s.composition);
    }
    for (const auto& u : s.unmodeled) e.children.push_back(u);
    return e;
  }

  static Element atom(const AtomSpecies& a) {
    Element chem = node("ChemicalElement", {leaf("NuclearCharge", std::to_string(a.nuclear_charge))});
    add_nonempty(chem, "ElementSymbol", a.element_symbol);
    Element iso = node("Isotope");
    if (a.mass_number || a.mass) {
      Element params = node("IsotopeParameters");
      if (a.mass_number) params.children.push_back(leaf("MassNumber", std::to_string(*a.mass_number)));
      if (a.mass) params.children.push_back(node("Mass", {value_element(*a.mass)}));
      iso.children.push_back(std::move(params));
    }
    Element ion = node("Ion", {leaf("IonCharge", std::to_string(a.ion_charge))});
    ion.attributes = {{"speciesID", a.species_id}};
    for (const auto& s : a.states) ion.children.push_back(atomic_state(s));
    add_nonempty(ion, "InChIKey", a.inchikey);
    for (const auto& u : a.unmodeled) ion.children.push_back(u);
    iso.children.push_back(std::move(ion));
    return node("Atom", {std::move(chem), std::move(iso)});
  }

  static Element molecular_state(const MolecularState& s) {
    Element e = node("MolecularState");
    if (s.auxiliary) e.attributes.push_back({"auxillary", "true"});
    e.attributes.push_back({"stateID", s.state_id});
    add_refs(e, "SourceRef", s.source_refs);
    add_leaf(e, "Description", s.description);
    Element ch = node("MolecularStateCharacterisation");
    if (s.energy_value || s.energy_origin_ref) {
      Element energy = node("StateEnergy");
      if (s.energy_origin_ref) energy.attributes.push_back({"energyOrigin", *s.energy_origin_ref});
      if (s.energy_value) energy.children.push_back(value_element({*s.energy_value, s.energy_units}));
      ch.children.push_back(std::move(energy));
    }
    if (s.total_statistical_weight) {
      ch.children.push_back(leaf("TotalStatisticalWeight", std::to_string(*s.total_statistical_weight)));
    }
    if (s.nuclear_statistical_weight) {
      ch.children.push_back(
          leaf("NuclearStatisticalWeight", std::to_string(*s.nuclear_statistical_weight)));
    }
    if (!ch.children.empty()) e.children.push_back(std::move(ch));
    if (!s.case_id.empty() || !s.quantum_numbers.empty()) {
      Element c = node("Case");
      c.attributes = s.case_attributes;
      std::string pfx = s.case_prefix.empty() ? s.case_id : s.case_prefix;
      if (s.case_attributes.empty() && !pfx.empty()) {
        c.attributes.push_back({"xsi:type", pfx + ":Case"});
      }
      c.attributes.push_back({"caseID", s.case_id});
      std::string qpfx = pfx.empty() ? "" : pfx + ":";
      Element qns = node(qpfx + "QNs");
      for (const auto& [k, v] : s.quantum_numbers) qns.children.push_back(leaf(qpfx + k, v));
      c.children.push_back(std::move(qns));
      e.children.push_back(std::move(c));
    }
    for (const auto& u : s.unmodeled) e.children.push_back(u);
    return e;
  }

  static Element molecule(const MoleculeSpecies& m) {
    Element chem = node("MolecularChemicalSpecies");
    if (!m.ordinary_formula.empty()) {
      chem.children.push_back(node("OrdinaryStructuralFormula", {leaf("Value", m.ordinary_formula)}));
    }
    add_nonempty(chem, "StoichiometricFormula", m.stoichiometric_formula);
    if (!m.chemical_name.empty()) {
      chem.children.push_back(node("ChemicalName", {leaf("Value", m.chemical_name)}));
    }
    add_nonempty(chem, "InChI", m.inchi);
    add_nonempty(chem, "InChIKey", m.inchikey);
    add_nonempty(chem, "VAMDCSpeciesID", m.vamdc_species_id);
    if (m.structure) chem.children.push_back(*m.structure);
    if (m.partition_function) {
      const auto& pf = *m.partition_function;
      chem.children.push_back(node("PartitionFunction", {data_axis("T", pf.t_units, pf.temperatures),
                                                         data_axis("Q", "", pf.values)}));
    }
    if (m.molecular_weight) {
      chem.children.push_back(node("StableMolecularProperties",
                                   {node("MolecularWeight", {value_element(*m.molecular_weight)})}));
    }
    add_leaf(chem, "Comment", m.comment);
    Element e = node("Molecule", {std::move(chem)});
    e.attributes = {{"speciesID", m.species_id}};
    for (const auto& s : m.states) e.children.push_back(molecular_state(s));
    for (const auto& u : m.unmodeled) e.children.push_back(u);
    return e;
  }

  static Element radiative(const RadiativeTransition& t) {
    Element e = node("RadiativeTransition");
    e.attributes = {{"id", t.id}};
    if (!t.process_kind.empty()) e.attributes.push_back({"process", t.process_kind});
    add_refs(e, "SourceRef", t.source_refs);
    if (t.frequency) {
      Element f = node("Frequency", {value_element(*t.frequency)});
      if (t.frequency_accuracy) f.children.push_back(leaf("Accuracy", t.frequency_accuracy->text));
      e.children.push_back(node("EnergyWavelength", {std::move(f)}));
    }
    add_nonempty(e, "UpperStateRef", t.upper_state_ref);
    add_nonempty(e, "LowerStateRef", t.lower_state_ref);
    add_nonempty(e, "SpeciesRef", t.species_ref);
    if (t.probability_a || t.idealised_intensity || t.multipole) {
      Element p = node("Probability");
      if (t.probability_a) p.children.push_back(node("TransitionProbabilityA", {value_element(*t.probability_a)}));
      if (t.idealised_intensity) {
        p.children.push_back(node("IdealisedIntensity", {value_element(*t.idealised_intensity)}));
      }
      add_leaf(p, "Multipole", t.multipole);
      e.children.push_back(std::move(p));
    }
    if (!t.process_class_code.empty()) {
      e.children.push_back(node("ProcessClass", {leaf("Code", t.process_class_code)}));
    }
    for (const auto& u : t.unmodeled) e.children.push_back(u);
    return e;
  }

  static Element species_state(std::string name, const SpeciesStateRef& r) {
    Element e = node(std::move(name));
    add_nonempty(e, "SpeciesRef", r.species_ref);
    add_nonempty(e, "StateRef", r.state_ref);
    return e;
  }

  static Element collision(const CollisionalTransition& t) {
    Element e = node("CollisionalTransition");
    e.attributes = {{"id", t.id}};
    add_leaf(e, "Comments", t.comments);
    add_refs(e, "SourceRef", t.source_refs);
    if (!t.process_class_code.empty()) {
      e.children.push_back(node("ProcessClass", {leaf("Code", t.process_class_code)}));
    }
    for (const auto& r : t.reactants) e.children.push_back(species_state("Reactant", r));
    for (const auto& r : t.products) e.children.push_back(species_state("Product", r));
    if (!t.datasets.empty()) {
      Element sets = node("DataSets");
      for (const auto& d : t.datasets) {
        Element tab = node("TabulatedData");
        add_leaf(tab, "Comments", d.comments);
        tab.children.push_back(data_axis("X", d.x_units, d.x_values));
        tab.children.push_back(data_axis("Y", d.y_units, d.y_values));
        Element ds = node("DataSet", {std::move(tab)});
        ds.attributes = {{"dataDescription", d.description}};
        sets.children.push_back(std::move(ds));
      }
      e.children.push_back(std::move(sets));
    }
    for (const auto& u : t.unmodeled) e.children.push_back(u);
    return e;
  }

  Element source(const Source& s) const {
    Element e = node("Source");
    e.attributes = {{"sourceID", s.source_id}};
    add_nonempty(e, "Category", s.category);
    add_leaf(e, "SourceName", s.source_name);
    if (canonical_ && s.is_self_reference() && s.year) {
      e.children.push_back(leaf("Year", std::string(kProductionYearSentinel)));
    } else {
      add_leaf(e, "Year", s.year);
    }
    if (!s.authors.empty()) {
      Element authors = node("Authors");
      for (const auto& a : s.authors) authors.children.push_back(node("Author", {leaf("Name", a)}));
      e.children.push_back(std::move(authors));
    }
    add_leaf(e, "Title", s.title);
    add_leaf(e, "Volume", s.volume);
    add_leaf(e, "PageBegin", s.page_begin);
    add_leaf(e, "PageEnd", s.page_end);
    add_leaf(e, "UniformResourceIdentifier", s.uri);
    add_leaf(e, "DigitalObjectIdentifier", s.doi);
    if (s.production_date) {
      e.children.push_back(leaf("ProductionDate", canonical_ && s.is_self_reference()
                                                      ? std::string(kProductionDateSentinel)
                                                      : *s.production_date));
    }
    add_leaf(e, "Comments", s.comments);
    for (const auto& u : s.unmodeled) e.children.push_back(u);
    return e;
  }
};

}  // namespace

ParseResult parse(std::string_view bytes) {
  auto tree = xml::read(bytes);
  ParseResult result;
  result.diagnostics.recovered = !tree.warnings.empty();
  result.diagnostics.warnings = std::move(tree.warnings);
  result.document = DocumentReader(result.diagnostics).read(tree.root);
  return result;
}

XsamsDocument parse_document(std::string_view bytes) { return parse(bytes).document; }

xml::Element to_element(const XsamsDocument& doc) {
  return DocumentWriter(false).write(doc);
}

std::string serialize(const XsamsDocument& doc) {
  return xml::write(to_element(doc));
}

std::string canonical_form(const XsamsDocument& doc) {
  xml::WriteOptions opts;
  opts.indent = false;
  opts.sort_attributes = true;
  opts.declaration = false;
  return xml::write(DocumentWriter(true).write(doc), opts);
}

std::string canonical_digest(const XsamsDocument& doc) {
  return sha256_hex(canonical_form(doc));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, path, "cannot open file");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::StorageFailure, path, "cannot open file for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::StorageFailure, path, "write failed");
}

}  // namespace xsams

#include "xsams/node.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "xsams/error.hpp"
#include "xsams/io.hpp"

namespace xsams::node {

using nlohmann::json;

double wavelength_angstrom(double frequency_mhz) {
  constexpr double angstrom_per_metre = 1e10;
  constexpr double hz_per_mhz = 1e6;
  return kSpeedOfLight * angstrom_per_metre / (frequency_mhz * hz_per_mhz);
}

namespace {

std::string shortest(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

template <class T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::InvalidInput, key, "missing node configuration key");
  return j.at(key).get<T>();
}

template <class T>
std::optional<T> optional_key(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

const MoleculeSpecies* find_molecule(const XsamsDocument& doc, std::string_view id) {
  for (const auto& m : doc.molecules) {
    if (m.species_id == id) return &m;
  }
  return nullptr;
}

const AtomSpecies* find_atom(const XsamsDocument& doc, std::string_view id) {
  for (const auto& a : doc.atoms) {
    if (a.species_id == id) return &a;
  }
  return nullptr;
}

}  // namespace

NodeConfig parse_config(std::string_view json_text) {
  NodeConfig c;
  try {
    auto j = json::parse(json_text);
    c.name = required<std::string>(j, "name");
    c.homepage_url = required<std::string>(j, "homepage_url");
    c.origin_identifier = required<std::string>(j, "origin_identifier");
    c.source_prefix = required<std::string>(j, "source_prefix");
    c.comments = optional_key<std::string>(j, "comments");
    if (j.contains("self_source")) {
      const auto& s = j.at("self_source");
      c.self_source.source_name = optional_key<std::string>(s, "source_name");
      c.self_source.authors = s.value("authors", std::vector<std::string>{});
      c.self_source.uri = optional_key<std::string>(s, "uri");
      c.self_source.comments = s.value("comments", std::string("{query}"));
    }
    for (const auto& v : required<json>(j, "versions")) {
      NodeVersion nv;
      nv.version_id = required<std::string>(v, "version_id");
      nv.timestamp = Timestamp{required<std::string>(v, "timestamp")};
      nv.is_default = v.value("default", false);
      for (const auto& m : v.value("members", std::vector<std::string>{})) nv.members.insert(m);
      c.versions.push_back(std::move(nv));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, "node configuration", e.what());
  }
  if (c.versions.empty()) {
    throw Error(ErrorCode::InvalidInput, "versions", "node configuration declares no version");
  }
  std::set<std::string> seen;
  int defaults = 0;
  for (const auto& v : c.versions) {
    defaults += v.is_default;
    for (const auto& m : v.members) {
      if (!seen.insert(m).second) {
        throw Error(ErrorCode::MultipleVersionMembership, m, "listed by two node versions");
      }
    }
  }
  if (defaults > 1) {
    throw Error(ErrorCode::InvalidInput, "versions", "more than one default version");
  }
  return c;
}

NodeConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

query::Record derived_attributes(const XsamsDocument& holdings, const RadiativeTransition& t) {
  query::Record r;
  if (t.frequency && t.frequency->units == "MHz") {
    if (auto f = t.frequency->value.try_value(); f && *f > 0) {
      r["RadTransFrequency"] = t.frequency->value.text;
      r["RadTransWavelength"] = shortest(wavelength_angstrom(*f));
    }
  }
  if (const auto* m = find_molecule(holdings, t.species_ref)) {
    r["MoleculeStoichiometricFormula"] = m->stoichiometric_formula;
    r["MoleculeChemicalName"] = m->chemical_name;
    r["InchiKey"] = m->inchikey;
  } else if (const auto* a = find_atom(holdings, t.species_ref)) {
    r["AtomSymbol"] = a->element_symbol;
    r["IonCharge"] = std::to_string(a->ion_charge);
  }
  return r;
}

query::Record derived_attributes(const XsamsDocument& holdings, const CollisionalTransition& t) {
  query::Record r;
  bool have_target = false;
  for (const auto& reactant : t.reactants) {
    if (const auto* m = find_molecule(holdings, reactant.species_ref)) {
      std::string role = have_target ? "collider." : "target.";
      if (!r.count(role + "MoleculeStoichiometricFormula")) {
        r[role + "MoleculeStoichiometricFormula"] = m->stoichiometric_formula;
        r[role + "InchiKey"] = m->inchikey;
      }
      have_target = true;
    }
  }
  for (const auto& reactant : t.reactants) {
    if (const auto* a = find_atom(holdings, reactant.species_ref)) {
      std::string role = have_target ? "collider." : "target.";
      if (!r.count(role + "AtomSymbol")) {
        r[role + "AtomSymbol"] = a->element_symbol;
        r[role + "IonCharge"] = std::to_string(a->ion_charge);
      }
      have_target = true;
    }
  }
  if (!t.process_class_code.empty()) r["CollisionCode"] = t.process_class_code;
  return r;
}

NodeDataset make_dataset(XsamsDocument holdings, std::string_view sidecar) {
  NodeDataset ds;
  ds.holdings = std::move(holdings);
  for (const auto& t : ds.holdings.radiative) ds.attributes[t.id] = derived_attributes(ds.holdings, t);
  for (const auto& t : ds.holdings.collisions) ds.attributes[t.id] = derived_attributes(ds.holdings, t);

  std::istringstream in{std::string(sidecar)};
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw Error(ErrorCode::InvalidInput, "attributes:" + std::to_string(lineno), "unterminated section header");
      }
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      continue;
    }
    auto eq = text.find('=');
    if (eq == std::string::npos || section.empty()) {
      throw Error(ErrorCode::InvalidInput, "attributes:" + std::to_string(lineno),
                  "expected 'keyword = value' inside a [id] section");
    }
    auto key = trim(std::string_view(text).substr(0, eq));
    auto value = trim(std::string_view(text).substr(eq + 1));
    if (key == "cites") {
      std::istringstream ids(value);
      for (std::string id; ids >> id;) ds.cites[section].push_back(id);
    } else {
      ds.attributes[section][key] = value;
    }
  }
  return ds;
}

NodeDataset load_dataset(const std::string& path) {
  auto bytes = read_file(path);
  XsamsDocument holdings;
  if (!trim(bytes).empty()) holdings = parse(bytes).document;
  std::string sidecar;
  if (std::ifstream probe(path + ".attrs"); probe) sidecar = read_file(path + ".attrs");
  return make_dataset(std::move(holdings), sidecar);
}

namespace {

// Collects the identifiers a set of processes pulls in.
struct Closure {
  const NodeDataset& ds;
  std::set<std::string> species, states, sources;

  void cite(const std::string& id) {
    if (auto it = ds.cites.find(id); it != ds.cites.end()) {
      sources.insert(it->second.begin(), it->second.end());
    }
  }

  void state(const std::string& id) {
    if (id.empty() || !states.insert(id).second) return;
    for (const auto& m : ds.holdings.molecules) {
      for (const auto& s : m.states) {
        if (s.state_id != id) continue;
        sources.insert(s.source_refs.begin(), s.source_refs.end());
        if (s.energy_origin_ref) state(*s.energy_origin_ref);
      }
    }
    for (const auto& a : ds.holdings.atoms) {
      for (const auto& s : a.states) {
        if (s.state_id == id) sources.insert(s.source_refs.begin(), s.source_refs.end());
      }
    }
  }

  void add_species(const std::string& id) {
    if (!id.empty() && species.insert(id).second) cite(id);
  }

  void add(const RadiativeTransition& t) {
    sources.insert(t.source_refs.begin(), t.source_refs.end());
    add_species(t.species_ref);
    state(t.upper_state_ref);
    state(t.lower_state_ref);
    cite(t.id);
  }

  void add(const CollisionalTransition& t) {
    sources.insert(t.source_refs.begin(), t.source_refs.end());
    for (const auto* side : {&t.reactants, &t.products}) {
      for (const auto& r : *side) {
        add_species(r.species_ref);
        state(r.state_ref);
      }
    }
    cite(t.id);
  }
};

const NodeVersion& version_of(const NodeConfig& config, const std::string& id) {
  const NodeVersion* fallback = nullptr;
  for (const auto& v : config.versions) {
    if (v.members.count(id)) return v;
    if (v.is_default) fallback = &v;
  }
  return fallback ? *fallback : config.versions.front();
}

Source make_self_source(const NodeConfig& config, const std::string& rendered,
                        const Timestamp& now) {
  Source s;
  s.source_id = config.self_source_id();
  s.category = "database";
  s.source_name = config.self_source.source_name;
  s.year = now.text.substr(0, 4);
  s.authors = config.self_source.authors;
  if (config.self_source.uri) s.uri = replace_all(*config.self_source.uri, "{query}", rendered);
  s.production_date = now.date();
  s.comments = replace_all(config.self_source.comments, "{query}", rendered);
  return s;
}

}  // namespace

XsamsDocument answer(const NodeDataset& dataset, const NodeConfig& config,
                     const query::QueryAst& ast, const Timestamp& now) {
  const auto& h = dataset.holdings;
  auto matches = [&](const std::string& id) {
    auto it = dataset.attributes.find(id);
    return it != dataset.attributes.end() && query::evaluate(ast, it->second);
  };

  XsamsDocument out;
  out.root_attributes = h.root_attributes;
  Closure closure{dataset, {}, {}, {}};
  for (const auto& t : h.radiative) {
    if (matches(t.id)) {
      out.radiative.push_back(t);
      closure.add(t);
    }
  }
  for (const auto& t : h.collisions) {
    if (matches(t.id)) {
      out.collisions.push_back(t);
      closure.add(t);
    }
  }
  for (const auto& a : h.atoms) {
    if (!closure.species.count(a.species_id)) continue;
    auto copy = a;
    std::erase_if(copy.states, [&](const AtomicState& s) { return !closure.states.count(s.state_id); });
    out.atoms.push_back(std::move(copy));
  }
  for (const auto& m : h.molecules) {
    if (!closure.species.count(m.species_id)) continue;
    auto copy = m;
    std::erase_if(copy.states, [&](const MolecularState& s) { return !closure.states.count(s.state_id); });
    out.molecules.push_back(std::move(copy));
  }

  auto rendered = query::render(ast);
  bool empty = out.radiative.empty() && out.collisions.empty();
  if (!empty) {
    out.sources.push_back(make_self_source(config, rendered, now));
    for (const auto& s : h.sources) {
      if (closure.sources.count(s.source_id) && s.source_id != config.self_source_id()) {
        out.sources.push_back(s);
      }
    }
  }

  Origin origin;
  origin.kind = OriginKind::Node;
  origin.timestamp = now;
  origin.homepage_url = config.homepage_url;
  origin.name = config.name;
  origin.comments = config.comments;
  origin.query = rendered;
  origin.origin_identifier = config.origin_identifier;

  std::map<std::string, Version> by_id;
  auto version = [&](const std::string& id) -> Version& {
    const auto& nv = version_of(config, id);
    auto& v = by_id[nv.version_id];
    v.version_id = nv.version_id;
    v.timestamp = nv.timestamp;
    return v;
  };
  for (const auto& a : out.atoms) version(a.species_id).species_refs.push_back(a.species_id);
  for (const auto& m : out.molecules) version(m.species_id).species_refs.push_back(m.species_id);
  for (const auto& a : out.atoms) {
    for (const auto& s : a.states) version(s.state_id).state_refs.push_back(s.state_id);
  }
  for (const auto& m : out.molecules) {
    for (const auto& s : m.states) version(s.state_id).state_refs.push_back(s.state_id);
  }
  for (const auto& t : out.radiative) version(t.id).process_refs.push_back(t.id);
  for (const auto& t : out.collisions) version(t.id).process_refs.push_back(t.id);
  for (const auto& s : out.sources) version(s.source_id).source_refs.push_back(s.source_id);
  if (by_id.empty()) {
    const auto& nv = version_of(config, "");
    by_id[nv.version_id] = Version{nv.version_id, false, nv.timestamp, {}, {}, {}, {}};
  }
  for (const auto& nv : config.versions) {
    if (auto it = by_id.find(nv.version_id); it != by_id.end()) {
      origin.versions.push_back(std::move(it->second));
    }
  }
  out.origins.push_back(std::move(origin));
  return out;
}

LocalNode::LocalNode(std::shared_ptr<const NodeDataset> dataset, NodeConfig config)
    : dataset_(std::move(dataset)), config_(std::move(config)) {}

XsamsDocument LocalNode::execute(const query::QueryAst& ast, const Timestamp& now) {
  if (!dataset_) throw Error(ErrorCode::NodeUnavailable, config_.origin_identifier, "no holdings loaded");
  return answer(*dataset_, config_, ast, now);
}

HttpNode::HttpNode(std::string host, int port, std::string origin_identifier)
    : host_(std::move(host)), port_(port), origin_identifier_(std::move(origin_identifier)) {}

XsamsDocument HttpNode::execute(const query::QueryAst& ast, const Timestamp&) {
  httplib::Client client(host_, port_);
  client.set_connection_timeout(5);
  httplib::Params params{{"LANG", "VSS2"},
                         {"REQUEST", "doQuery"},
                         {"FORMAT", "XSAMS"},
                         {"QUERY", query::render(ast)}};
  auto res = client.Get("/tap/sync", params, httplib::Headers{});
  std::string where = host_ + ":" + std::to_string(port_);
  if (!res) throw Error(ErrorCode::NodeUnavailable, where, httplib::to_string(res.error()));
  if (res->status != 200) {
    throw Error(ErrorCode::NodeUnavailable, where, "HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  return parse_document(res->body);
}

bool serve(std::shared_ptr<const NodeDataset> dataset, const NodeConfig& config,
           const std::string& host, int port) {
  httplib::Server server;
  server.Get("/tap/sync", [&](const httplib::Request& req, httplib::Response& res) {
    if (req.get_param_value("REQUEST") != "doQuery" ||
        (req.has_param("FORMAT") && req.get_param_value("FORMAT") != "XSAMS")) {
      res.status = 400;
      res.set_content("only REQUEST=doQuery&FORMAT=XSAMS is supported\n", "text/plain");
      return;
    }
    try {
      auto ast = query::parse_query(req.get_param_value("QUERY"));
      res.set_content(serialize(answer(*dataset, config, ast, now_utc())), "application/xml");
    } catch (const Error& e) {
      res.status = 400;
      res.set_content(std::string(e.what()) + "\n", "text/plain");
    }
  });
  return server.listen(host, port);
}

}  // namespace xsams::node

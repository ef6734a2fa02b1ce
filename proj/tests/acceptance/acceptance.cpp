// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any
// fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "xsams/bibtex.hpp"
#include "xsams/error.hpp"
#include "xsams/io.hpp"
#include "xsams/merge.hpp"
#include "xsams/node.hpp"
#include "xsams/query.hpp"
#include "xsams/query_store.hpp"
#include "xsams/validator.hpp"

using namespace xsams;
namespace fs = std::filesystem;

namespace {

constexpr const char* kBasecolQuery =
    "select * where ((target.MoleculeStoichiometricFormula = 'CO')) AND ((collider.AtomSymbol = 'he'))";
constexpr const char* kCdmsQuery =
    "select * where (RadTransWavelength >= 2.6006E7 AND RadTransWavelength <= 2.6008E7) "
    "AND ((MoleculeStoichiometricFormula = 'CO'))";
const Timestamp kQueryTime{"2015-12-03T14:40:21+01:00"};
const Timestamp kCdmsQueryTime{"2015-12-03T15:50:21+01:00"};
const Timestamp kMergeTime{"2015-12-07T15:50:21+01:00"};
const char* kFixtures[] = {"basecol_co_he.xml", "cdms_co.xml", "merged_co_he.xml"};

using Ids = std::set<std::string>;

std::string fixture(const std::string& name) { return std::string(XSAMS_FIXTURES) + "/" + name; }
XsamsDocument load(const std::string& name) { return parse_document(read_file(fixture(name))); }

// Collects reasons for failure within one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Ids ids_of(const Version& v) {
  Ids out;
  for (const auto* list : {&v.species_refs, &v.state_refs, &v.process_refs, &v.source_refs}) {
    out.insert(list->begin(), list->end());
  }
  return out;
}

std::shared_ptr<node::LocalNode> local_node(const std::string& stem) {
  auto ds = std::make_shared<const node::NodeDataset>(
      node::load_dataset(fixture("nodes/" + stem + "_holdings.xml")));
  return std::make_shared<node::LocalNode>(ds, node::load_config(fixture("nodes/" + stem + ".json")));
}

void round_trip(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  for (const char* name : kFixtures) {
    auto doc = load(name);
    c.expect(parse_document(serialize(doc)) == doc, std::string(name) + " changed on round trip");
  }
  double s = seconds_since(t0);
  c.expect(s < 1.0, "took " + std::to_string(s) + " s");
}

void validation(Check& c) {
  for (const char* name : kFixtures) {
    c.expect(validate(load(name)).valid(), std::string(name) + " has errors");
  }
  struct Mutation {
    const char* fixture;
    std::string_view code;
    std::function<void(XsamsDocument&)> apply;
  };
  std::vector<Mutation> suite = {
      {"merged_co_he.xml", rule::kMultipleVersionMembership,
       [](XsamsDocument& d) { d.origins[0].sub_origins[1].versions[0].state_refs.push_back("SCDMS-83-1"); }},
      {"basecol_co_he.xml", rule::kNodeOriginWithSubOrigins,
       [](XsamsDocument& d) {
         auto sub = d.origins[0];
         sub.versions = {Version{"VERSUB", false, sub.versions[0].timestamp, {}, {}, {}, {}}};
         d.origins[0].sub_origins.push_back(sub);
       }},
      {"merged_co_he.xml", rule::kProcessorWithoutSubOrigins,
       [](XsamsDocument& d) {
         d.origins[0].kind = OriginKind::Processor;
         d.origins[0].origin_identifier = "ivo://example/proc";
         d.origins[0].sub_origins.clear();
       }},
      {"merged_co_he.xml", rule::kGlobalVersionWithMultipleOrigins,
       [](XsamsDocument& d) {
         auto& v = d.origins[0].sub_origins[0].versions[0];
         v = Version{v.version_id, true, v.timestamp, {}, {}, {}, {}};
       }},
      {"basecol_co_he.xml", rule::kUnresolvedReference,
       [](XsamsDocument& d) { d.collisions[0].reactants[0].state_ref = "SBASET52-9"; }},
      {"basecol_co_he.xml", rule::kMissingRequiredField, [](XsamsDocument& d) { d.origins[0].query.reset(); }},
      {"cdms_co.xml", rule::kDuplicateIdentifier,
       [](XsamsDocument& d) { d.sources.push_back(d.sources[1]); }},
      {"basecol_co_he.xml", rule::kInvalidTimestamp,
       [](XsamsDocument& d) { d.origins[0].timestamp.text = "3 Dec 2015"; }},
      {"basecol_co_he.xml", rule::kStateSpeciesMismatch,
       [](XsamsDocument& d) { d.collisions[0].reactants[1].state_ref = "SBASET52-1"; }},
      {"merged_co_he.xml", rule::kUnexpectedQuery,
       [](XsamsDocument& d) { d.origins[0].query = "select * where ((A = 'x'))"; }},
      {"basecol_co_he.xml", rule::kWrongReferenceKind,
       [](XsamsDocument& d) { d.collisions[0].reactants[0].state_ref = "BBAS849"; }},
  };
  for (const auto& m : suite) {
    auto doc = load(m.fixture);
    m.apply(doc);
    auto report = validate(doc);
    std::set<std::string> codes;
    for (const auto& f : report.errors) codes.insert(f.code);
    std::string seen;
    for (const auto& code : codes) seen += (seen.empty() ? "" : ",") + code;
    c.expect(codes == std::set<std::string>{std::string(m.code)},
             std::string(m.code) + " mutation reported [" + seen + "]");
  }
}

void grammar(Check& c) {
  using namespace query;
  auto a = parse_query(kBasecolQuery);
  c.expect(a.constraints.size() == 2 && a.constraints[0].keyword == "target.MoleculeStoichiometricFormula" &&
               a.constraints[0].op == Operator::Eq && a.constraints[0].value == Literal{Text{"CO"}} &&
               a.constraints[1].keyword == "collider.AtomSymbol" &&
               a.constraints[1].value == Literal{Text{"he"}},
           "BASECOL query AST");
  auto b = parse_query(kCdmsQuery);
  c.expect(b.constraints.size() == 3, "CDMS query has 3 constraints");
  if (b.constraints.size() == 3) {
    const auto& lo = b.constraints[0];
    const auto& hi = b.constraints[1];
    c.expect(lo.keyword == "RadTransWavelength" && lo.op == Operator::Ge &&
                 std::get<Number>(lo.value).literal == "2.6006E7",
             "lower wavelength bound");
    c.expect(hi.keyword == "RadTransWavelength" && hi.op == Operator::Le &&
                 std::get<Number>(hi.value).literal == "2.6008E7",
             "upper wavelength bound");
    c.expect(b.constraints[2].value == Literal{Text{"CO"}}, "formula constraint");
  }
  for (const char* q : {kBasecolQuery, kCdmsQuery}) {
    auto r = render(parse_query(q));
    c.expect(render(parse_query(r)) == r, "render not idempotent");
    c.expect(parse_query(r) == parse_query(q), "render changes the AST");
  }
}

void node_reproduction(Check& c) {
  struct Case {
    const char* stem;
    const char* query;
    const char* reference;
    Timestamp now;
  };
  for (const auto& [stem, q, reference, now] : {Case{"basecol", kBasecolQuery, "basecol_co_he.xml", kQueryTime},
                                               Case{"cdms", kCdmsQuery, "cdms_co.xml", kCdmsQueryTime}}) {
    auto got = local_node(stem)->execute(query::parse_query(q), now);
    auto want = load(reference);
    std::string tag = stem;
    if (got.origins.size() != 1) {
      c.expect(false, tag + ": expected one Origin");
      continue;
    }
    const auto& g = got.origins[0];
    const auto& w = want.origins[0];
    c.expect(g.kind == w.kind && g.timestamp == w.timestamp && g.homepage_url == w.homepage_url &&
                 g.name == w.name && g.origin_identifier == w.origin_identifier && g.sub_origins.empty(),
             tag + ": Origin fields differ");
    c.expect(g.query && query::parse_query(*g.query) == query::parse_query(*w.query), tag + ": Query differs");
    c.expect(g.versions.size() == w.versions.size(), tag + ": Version count");
    for (std::size_t i = 0; i < std::min(g.versions.size(), w.versions.size()); ++i) {
      c.expect(g.versions[i].version_id == w.versions[i].version_id &&
                   g.versions[i].timestamp == w.versions[i].timestamp,
               tag + ": Version attributes");
      c.expect(ids_of(g.versions[i]) == ids_of(w.versions[i]), tag + ": Version membership");
      for (auto [gl, wl] : {std::pair{&g.versions[i].species_refs, &w.versions[i].species_refs},
                            std::pair{&g.versions[i].state_refs, &w.versions[i].state_refs},
                            std::pair{&g.versions[i].process_refs, &w.versions[i].process_refs},
                            std::pair{&g.versions[i].source_refs, &w.versions[i].source_refs}}) {
        c.expect(Ids(gl->begin(), gl->end()) == Ids(wl->begin(), wl->end()), tag + ": per-kind membership");
      }
    }
  }
}

void merge_reproduction(Check& c) {
  auto a = load("basecol_co_he.xml");
  auto merged = merge::merge(load("cdms_co.xml"), a, merge::MatchSpec{{"J"}},
                             merge::ToolConfig{"Spectcol",
                                               "http://www.vamdc.org/activities/research/software/spectcol/",
                                               std::nullopt, std::nullopt},
                             kMergeTime);
  if (merged.origins.size() != 1 || merged.origins[0].sub_origins.size() != 2 ||
      merged.origins[0].versions.size() != 1 || merged.collisions.size() != 1) {
    c.expect(false, "unexpected merged shape");
    return;
  }
  const auto& root = merged.origins[0];
  c.expect(ids_of(root.versions[0]) ==
               Ids{"PBASC50t2T1c1C1", "BBAS0", "BBAS849", "BCDMS0", "BCDMS-1921", "BCDMS-1681"},
           "root Version");
  c.expect(ids_of(root.sub_origins[0].versions.at(0)) ==
               Ids{"XCDMS-83", "SCDMS-83-1", "SCDMS-83-2", "SCDMS-origin-83", "PCDMS-R15140649"},
           "CDMS nested Version");
  c.expect(ids_of(root.sub_origins[1].versions.at(0)) == Ids{"XBAS2", "SBASET54-1"}, "BASECOL nested Version");
  const auto& coll = merged.collisions[0];
  c.expect(coll.reactants.at(0).state_ref == "SCDMS-83-2", "reactant state");
  c.expect(coll.products.at(0).state_ref == "SCDMS-83-1", "product state");
  c.expect(coll.datasets == a.collisions[0].datasets, "rate coefficients changed");
}

// Random toy pair: spectroscopic molecule with n states, collisional one with
// a subset, a He collider and one collision.
std::pair<XsamsDocument, XsamsDocument> toy_pair(std::mt19937& rng) {
  std::size_t n = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
  auto state = [](const std::string& id, std::size_t j) {
    MolecularState s;
    s.state_id = id;
    s.case_id = "dcs";
    s.case_prefix = "dcs";
    s.quantum_numbers = {{"J", std::to_string(j)}};
    return s;
  };
  auto origin = [](const std::string& name, Version v) {
    Origin o;
    o.kind = OriginKind::Node;
    o.timestamp = Timestamp{"2015-12-01T00:00:00Z"};
    o.versions = {std::move(v)};
    o.homepage_url = "http://" + name;
    o.name = name;
    o.query = "select * where ((A = 'x'))";
    o.origin_identifier = "ivo://" + name;
    return o;
  };
  auto source = [](const std::string& id) {
    Source s;
    s.source_id = id;
    s.category = "journal";
    s.year = "2001";
    s.authors = {"A. Author"};
    return s;
  };
  XsamsDocument spec, coll;
  MoleculeSpecies ms;
  ms.species_id = "XS";
  ms.vamdc_species_id = "CO-ID";
  Version vs{"VS", false, Timestamp{"2010-01-01T00:00:00Z"}, {"XS"}, {}, {"PS"}, {"BS"}};
  std::vector<std::size_t> js(n);
  for (std::size_t j = 0; j < n; ++j) js[j] = j;
  std::shuffle(js.begin(), js.end(), rng);
  for (std::size_t i = 0; i < n; ++i) {
    ms.states.push_back(state("SS" + std::to_string(i), js[i]));
    vs.state_refs.push_back("SS" + std::to_string(i));
  }
  RadiativeTransition rt;
  rt.id = "PS";
  rt.species_ref = "XS";
  rt.upper_state_ref = "SS0";
  rt.lower_state_ref = "SS1";
  spec.molecules = {ms};
  spec.radiative = {rt};
  spec.sources = {source("BS")};
  spec.origins = {origin("spec", vs)};

  MoleculeSpecies mc;
  mc.species_id = "XC";
  mc.vamdc_species_id = "CO-ID";
  AtomSpecies he;
  he.species_id = "XHe";
  he.element_symbol = "He";
  he.nuclear_charge = 2;
  he.states.push_back(AtomicState{});
  he.states[0].state_id = "SHe";
  Version vc{"VC", false, Timestamp{"2012-01-01T00:00:00Z"}, {"XC", "XHe"}, {"SHe"}, {"PC"}, {"BC"}};
  std::shuffle(js.begin(), js.end(), rng);
  std::size_t m = std::uniform_int_distribution<std::size_t>(2, n)(rng);
  for (std::size_t i = 0; i < m; ++i) {
    mc.states.push_back(state("SC" + std::to_string(i), js[i]));
    vc.state_refs.push_back("SC" + std::to_string(i));
  }
  CollisionalTransition ct;
  ct.id = "PC";
  ct.reactants = {{"XC", "SC1"}, {"XHe", "SHe"}};
  ct.products = {{"XC", "SC0"}, {"XHe", "SHe"}};
  coll.atoms = {he};
  coll.molecules = {mc};
  coll.collisions = {ct};
  coll.sources = {source("BC")};
  coll.origins = {origin("coll", vc)};
  return {spec, coll};
}

void merge_invariants(Check& c) {
  std::mt19937 rng(42);
  merge::ToolConfig tool{"toy", "http://toy", std::nullopt, std::nullopt};
  for (int round = 0; round < 100; ++round) {
    auto [spec, coll] = toy_pair(rng);
    auto merged = merge::merge(spec, coll, merge::MatchSpec{{"J"}}, tool, kMergeTime);
    std::string tag = "round " + std::to_string(round) + ": ";
    try {
      auto owner = version_membership(merged);
      c.expect(owner.size() == data_identifiers(merged).size(), tag + "membership incomplete");
    } catch (const Error& e) {
      c.expect(false, tag + "membership not a function: " + e.subject());
    }
    auto report = validate(merged);
    c.expect(!report.has_error(rule::kUnresolvedReference) && !report.has_error(rule::kWrongReferenceKind),
             tag + "dangling reference");
    std::multiset<std::string> before, after;
    for (const auto* d : {&spec, &coll}) {
      for (const auto& s : d->sources) before.insert(s.source_id);
    }
    for (const auto& s : merged.sources) after.insert(s.source_id);
    c.expect(before == after, tag + "sources not conserved");
    c.expect(origin_tree_depth(merged.origins) == 2, tag + "origin depth");
    if (c.failures.size() > 5) return;
  }
}

std::string field(const bibtex::BibEntry& e, std::string_view name) {
  const auto* v = e.field(name);
  return v ? *v : "<missing>";
}

void bibtex_check(Check& c) {
  auto entries = [](const std::string& name) { return bibtex::sources_of(load(name)).size(); };
  c.expect(entries("basecol_co_he.xml") == 2, "BASECOL document entry count");
  c.expect(entries("cdms_co.xml") == 3, "CDMS document entry count");
  c.expect(entries("merged_co_he.xml") == 5, "merged document entry count");
  auto a = load("basecol_co_he.xml");
  auto it = std::find_if(a.sources.begin(), a.sources.end(), [](const Source& s) { return s.source_id == "BBAS849"; });
  if (it == a.sources.end()) {
    c.expect(false, "BBAS849 missing");
    return;
  }
  auto e = bibtex::to_entry(*it);
  c.expect(field(e, "year") == "2002", "year");
  c.expect(field(e, "volume") == "571", "volume");
  c.expect(field(e, "pages") == "1015--1020", "pages");
  c.expect(field(e, "author") == "Balakrishnan, N. and Dalgarno, A. and Cecchi-Pestellini, C. and Bodo, E.", "authors");
  auto text = bibtex::doc_to_bibtex(load("merged_co_he.xml"));
  c.expect(static_cast<std::size_t>(std::count(text.begin(), text.end(), '@')) == 5, "merged document rendering");
}

void query_store(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  auto dir = fs::temp_directory_path() / ("xsams-acceptance-" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  auto journal = dir / "journal.jsonl";
  auto holdings = std::make_shared<const node::NodeDataset>(
      node::load_dataset(fixture("nodes/basecol_holdings.xml")));
  auto config = node::load_config(fixture("nodes/basecol.json"));
  node::LocalNode node(holdings, config);
  std::string id;
  {
    store::QueryStore qs(store::StoreOptions{journal, true});
    auto record = qs.register_document(node.execute(query::parse_query(kBasecolQuery), kQueryTime));
    id = record.identifier;
    c.expect(qs.resolve(id) == record, "resolve after register");
    c.expect(qs.reexecute(id, node, now_utc()).match, "unchanged node should match");
    auto edited = std::make_shared<node::NodeDataset>(*holdings);
    edited->holdings.collisions.at(0).datasets.at(0).y_values.at(0) = "3.5E-11";
    node::LocalNode changed(edited, config);
    c.expect(!qs.reexecute(id, changed, now_utc()).match, "edited node should not match");
  }
  store::QueryStore restarted(store::StoreOptions{journal, true});
  try {
    c.expect(restarted.resolve(id).identifier == id, "record after restart");
  } catch (const Error&) {
    c.expect(false, "record lost on restart");
  }
  fs::remove_all(dir);
  double s = seconds_since(t0);
  c.expect(s < 5.0, "took " + std::to_string(s) + " s");
}

void digest_property(Check& c) {
  for (const char* name : kFixtures) {
    auto doc = load(name);
    auto base = canonical_digest(doc);
    auto moved = doc;
    for_each_origin(moved.origins, [](Origin& o) { o.timestamp.text = "2030-06-01T12:00:00Z"; });
    c.expect(canonical_digest(moved) == base, std::string(name) + ": timestamp edit changed digest");
    int edits = 0;
    for (std::size_t v = 0; v < all_versions(doc).size(); ++v) {
      for (int kind = 0; kind < 4; ++kind) {
        auto copy = doc;
        auto versions = all_versions(copy);
        auto* ver = const_cast<Version*>(versions[v]);
        auto* list = std::array{&ver->species_refs, &ver->state_refs, &ver->process_refs, &ver->source_refs}[kind];
        if (list->empty()) continue;
        list->pop_back();
        c.expect(canonical_digest(copy) != base, std::string(name) + ": removal kept digest");
        list->push_back("EXTRA");
        c.expect(canonical_digest(copy) != base, std::string(name) + ": replacement kept digest");
        ++edits;
      }
    }
    c.expect(edits > 0, std::string(name) + ": nothing to edit");
  }
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    void (*fn)(Check&);
  };
  const Criterion criteria[] = {
      {"round-trip", round_trip},
      {"validation", validation},
      {"query grammar", grammar},
      {"node reproduction", node_reproduction},
      {"merge reproduction", merge_reproduction},
      {"merge invariants", merge_invariants},
      {"bibtex", bibtex_check},
      {"query store end-to-end", query_store},
      {"digest property", digest_property},
  };
  int failed = 0;
  int n = 0;
  for (const auto& cr : criteria) {
    ++n;
    Check c;
    try {
      cr.fn(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    std::cout << (c.failures.empty() ? "PASS" : "FAIL") << " " << n << " " << cr.name;
    if (!c.failures.empty()) {
      ++failed;
      std::cout << " (" << c.failures.front();
      for (std::size_t i = 1; i < c.failures.size(); ++i) std::cout << "; " << c.failures[i];
      std::cout << ")";
    }
    std::cout << "\n";
  }
  return failed == 0 ? 0 : 1;
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "support.hpp"
#include "xsams/error.hpp"
#include "xsams/merge.hpp"
#include "xsams/validator.hpp"

using namespace xsams;

namespace {

using Ids = std::set<std::string>;

const merge::ToolConfig kTool{"Spectcol", "http://www.vamdc.org/activities/research/software/spectcol/",
                              std::nullopt, std::nullopt};
const Timestamp kNow{"2015-12-07T15:50:21+01:00"};

Ids ids_of(const Version& v) {
  Ids out;
  for (const auto* list : {&v.species_refs, &v.state_refs, &v.process_refs, &v.source_refs}) {
    out.insert(list->begin(), list->end());
  }
  return out;
}

void expect_code(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    FAIL("expected " << to_string(code));
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

XsamsDocument reference_merge() {
  return merge::merge(testing::load("cdms_co.xml"), testing::load("basecol_co_he.xml"),
                      merge::MatchSpec{{"J"}}, kTool, kNow);
}

// Toy documents: one molecule with n states keyed by J, one collision between
// two of them, and a single node origin.
struct Toy {
  XsamsDocument doc;
  std::vector<std::string> js;
};

MolecularState toy_state(const std::string& id, const std::string& j) {
  MolecularState s;
  s.state_id = id;
  s.case_id = "dcs";
  s.case_prefix = "dcs";
  s.quantum_numbers = {{"ElecStateLabel", "X"}, {"J", j}};
  return s;
}

Origin toy_origin(const std::string& name, const Version& v) {
  Origin o;
  o.kind = OriginKind::Node;
  o.timestamp = Timestamp{"2015-12-01T00:00:00Z"};
  o.versions = {v};
  o.homepage_url = "http://" + name;
  o.name = name;
  o.query = "select * where ((A = 'x'))";
  o.origin_identifier = "ivo://" + name;
  return o;
}

Source toy_source(const std::string& id) {
  Source s;
  s.source_id = id;
  s.category = "journal";
  s.year = "2001";
  s.authors = {"A. Author"};
  return s;
}

XsamsDocument toy_spectroscopic(const std::vector<std::string>& js, std::mt19937& rng) {
  XsamsDocument d;
  MoleculeSpecies m;
  m.species_id = "XS1";
  m.stoichiometric_formula = "CO";
  m.inchikey = "UGFAIRIUMAVXCW-UHFFFAOYSA-N";
  m.vamdc_species_id = "UGFAIRIUMAVXCW-UHFFFAOYSA-N";
  Version v{"VS", false, Timestamp{"2010-01-01T00:00:00Z"}, {"XS1"}, {}, {}, {"BS1"}};
  auto order = js;
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto id = "SS-" + std::to_string(i);
    m.states.push_back(toy_state(id, order[i]));
    v.state_refs.push_back(id);
  }
  RadiativeTransition t;
  t.id = "PS1";
  t.species_ref = "XS1";
  t.upper_state_ref = "SS-0";
  t.lower_state_ref = "SS-1";
  t.source_refs = {"BS1"};
  v.process_refs.push_back("PS1");
  d.molecules.push_back(m);
  d.radiative.push_back(t);
  d.sources.push_back(toy_source("BS1"));
  d.origins.push_back(toy_origin("spec", v));
  return d;
}

XsamsDocument toy_collisional(const std::vector<std::string>& js, std::mt19937& rng) {
  XsamsDocument d;
  MoleculeSpecies m;
  m.species_id = "XC1";
  m.stoichiometric_formula = "CO";
  m.inchikey = "UGFAIRIUMAVXCW-UHFFFAOYSA-N";
  m.vamdc_species_id = "UGFAIRIUMAVXCW-UHFFFAOYSA-N";
  AtomSpecies he;
  he.species_id = "XC2";
  he.element_symbol = "He";
  he.nuclear_charge = 2;
  AtomicState ground;
  ground.state_id = "SC2-1";
  he.states.push_back(ground);
  Version v{"VC", false, Timestamp{"2012-01-01T00:00:00Z"}, {"XC1", "XC2"}, {"SC2-1"}, {}, {"BC1"}};
  // a random subset of the spectroscopic J values, at least two
  auto subset = js;
  std::shuffle(subset.begin(), subset.end(), rng);
  subset.resize(std::uniform_int_distribution<std::size_t>(2, subset.size())(rng));
  for (std::size_t i = 0; i < subset.size(); ++i) {
    auto id = "SC-" + std::to_string(i);
    m.states.push_back(toy_state(id, subset[i]));
    v.state_refs.push_back(id);
  }
  CollisionalTransition c;
  c.id = "PC1";
  c.source_refs = {"BC1"};
  c.reactants = {{"XC1", "SC-1"}, {"XC2", "SC2-1"}};
  c.products = {{"XC1", "SC-0"}, {"XC2", "SC2-1"}};
  c.datasets.push_back(DataSet{"rateCoefficient", std::nullopt, "K", {"10", "20"}, "cm3/s", {"1E-11", "2E-11"}});
  v.process_refs.push_back("PC1");
  d.atoms.push_back(he);
  d.molecules.push_back(m);
  d.collisions.push_back(c);
  d.sources.push_back(toy_source("BC1"));
  d.origins.push_back(toy_origin("coll", v));
  return d;
}

std::multiset<std::string> source_ids(const XsamsDocument& d) {
  std::multiset<std::string> out;
  for (const auto& s : d.sources) out.insert(s.source_id);
  return out;
}

}  // namespace

TEST_CASE("merge reproduces the merged document provenance") {
  auto merged = reference_merge();
  auto want = testing::load("merged_co_he.xml");
  REQUIRE(merged.origins.size() == 1);
  const auto& root = merged.origins[0];
  CHECK(root.kind == OriginKind::Other);
  CHECK(root.timestamp == want.origins[0].timestamp);
  CHECK(root.name == want.origins[0].name);
  CHECK(root.homepage_url == want.origins[0].homepage_url);
  REQUIRE(root.versions.size() == 1);
  CHECK(root.versions[0].version_id == "VERMER1");
  CHECK(ids_of(root.versions[0]) ==
        Ids{"PBASC50t2T1c1C1", "BBAS0", "BBAS849", "BCDMS0", "BCDMS-1921", "BCDMS-1681"});
  REQUIRE(root.sub_origins.size() == 2);
  CHECK(root.sub_origins[0].name == "CDMS database");
  CHECK(ids_of(root.sub_origins[0].versions.at(0)) ==
        Ids{"XCDMS-83", "SCDMS-83-1", "SCDMS-83-2", "SCDMS-origin-83", "PCDMS-R15140649"});
  CHECK(ids_of(root.sub_origins[1].versions.at(0)) == Ids{"XBAS2", "SBASET54-1"});
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& w = want.origins[0].sub_origins[i].versions[0];
    CHECK(ids_of(root.sub_origins[i].versions[0]) == ids_of(w));
  }

  REQUIRE(merged.collisions.size() == 1);
  const auto& c = merged.collisions[0];
  CHECK(c.reactants[0].state_ref == "SCDMS-83-2");
  CHECK(c.products[0].state_ref == "SCDMS-83-1");
  CHECK(c.reactants[0].species_ref == "XCDMS-83");
  auto a = testing::load("basecol_co_he.xml");
  CHECK(c.datasets == a.collisions[0].datasets);
  CHECK(merged.comments == "Data merged by SPECTCOL.");
  CHECK(merged.molecules.size() == 1);
  CHECK(merged.sources.size() == 5);
  auto report = validate(merged);
  CHECK(report.valid());
  CHECK(explain(report) == "OK: 0 errors, 0 warnings");
}

TEST_CASE("state matching on J") {
  auto a = testing::load("basecol_co_he.xml");
  auto b = testing::load("cdms_co.xml");
  CHECK(merge::same_species(b.molecules[0], a.molecules[0]));
  auto m = merge::crossmatch_states(b.molecules[0], a.molecules[0], merge::MatchSpec{{"J"}});
  REQUIRE(m.target_of("SBASET52-1"));
  CHECK(*m.target_of("SBASET52-1") == "SCDMS-83-1");
  CHECK(*m.target_of("SBASET52-2") == "SCDMS-83-2");
  CHECK(m.unmatched_collisional.empty());
  CHECK(m.target_of("SCDMS-origin-83") == nullptr);
}

TEST_CASE("merge errors") {
  auto a = testing::load("basecol_co_he.xml");
  auto b = testing::load("cdms_co.xml");

  expect_code(ErrorCode::InvalidInput,
              [&] { merge::crossmatch_states(b.molecules[0], a.molecules[0], merge::MatchSpec{}); });

  auto other = a.molecules[0];
  other.vamdc_species_id = "SOMETHING-ELSE";
  other.inchikey = "SOMETHING-ELSE";
  expect_code(ErrorCode::SpeciesMismatch,
              [&] { merge::crossmatch_states(b.molecules[0], other, merge::MatchSpec{{"J"}}); });

  auto twin = b;
  twin.molecules[0].states[2] = twin.molecules[0].states[1];
  twin.molecules[0].states[2].state_id = "SCDMS-83-1b";
  expect_code(ErrorCode::AmbiguousMatch,
              [&] { merge::crossmatch_states(twin.molecules[0], a.molecules[0], merge::MatchSpec{{"J"}}); });

  auto missing = b;
  std::erase_if(missing.molecules[0].states, [](const auto& s) { return s.state_id == "SCDMS-83-2"; });
  expect_code(ErrorCode::UnmatchedReferencedState,
              [&] { merge::merge(missing, a, merge::MatchSpec{{"J"}}, kTool, kNow); });

  auto two_roots = a;
  two_roots.origins.push_back(two_roots.origins[0]);
  expect_code(ErrorCode::MultipleRootOrigins,
              [&] { merge::merge(b, two_roots, merge::MatchSpec{{"J"}}, kTool, kNow); });

  expect_code(ErrorCode::DuplicateIdentifier,
              [&] { merge::merge(b, b, merge::MatchSpec{{"J"}}, kTool, kNow); });
}

TEST_CASE("tool comment and identifier") {
  auto tool = kTool;
  tool.comment = "first pass";
  tool.origin_identifier = "ivo://vamdc/spectcol";
  auto merged = merge::merge(testing::load("cdms_co.xml"), testing::load("basecol_co_he.xml"),
                             merge::MatchSpec{{"J"}}, tool, kNow);
  CHECK(merged.origins[0].comments == "first pass");
  CHECK(merged.origins[0].origin_identifier == "ivo://vamdc/spectcol");
}

TEST_CASE("merge invariants on random toy molecules") {
  std::mt19937 rng(20151207);
  for (int round = 0; round < 200; ++round) {
    CAPTURE(round);
    std::size_t n = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
    std::vector<std::string> js;
    for (std::size_t j = 0; j < n; ++j) js.push_back(std::to_string(j));
    auto spec = toy_spectroscopic(js, rng);
    auto coll = toy_collisional(js, rng);
    REQUIRE(validate(spec).valid());
    REQUIRE(validate(coll).valid());

    auto merged = merge::merge(spec, coll, merge::MatchSpec{{"J"}}, kTool, kNow);

    // membership stays a function and covers everything
    std::map<std::string, std::string> owner;
    CHECK_NOTHROW(owner = version_membership(merged));
    CHECK(owner.size() == data_identifiers(merged).size());

    auto report = validate(merged);
    CHECK_FALSE(report.has_error(rule::kUnresolvedReference));
    CHECK_FALSE(report.has_error(rule::kWrongReferenceKind));
    CHECK_FALSE(report.has_error(rule::kStateSpeciesMismatch));
    CHECK(report.valid());

    auto before = source_ids(spec);
    for (const auto& s : source_ids(coll)) before.insert(s);
    CHECK(source_ids(merged) == before);

    CHECK(origin_tree_depth(merged.origins) ==
          std::max(origin_tree_depth(spec.origins), origin_tree_depth(coll.origins)) + 1);

    // collisions now point at spectroscopic states with the same J
    const auto& c = merged.collisions.at(0);
    for (const auto* side : {&c.reactants, &c.products}) {
      const auto& ref = side->at(0);
      CHECK(ref.species_ref == "XS1");
      CHECK(ref.state_ref.rfind("SS-", 0) == 0);
    }
  }
}

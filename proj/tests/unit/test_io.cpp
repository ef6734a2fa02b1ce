#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "xsams/error.hpp"
#include "xsams/io.hpp"

using namespace xsams;

namespace {

void expect_code(std::string_view bytes, ErrorCode code) {
  try {
    parse(bytes);
    FAIL("expected " << to_string(code));
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

constexpr const char* kHeader =
    R"(<XSAMSData xmlns="http://vamdc.org/xml/xsams/1.0" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance">)";

}  // namespace

TEST_CASE("fixtures round-trip to equal documents") {
  for (const char* name : {"basecol_co_he.xml", "cdms_co.xml", "merged_co_he.xml"}) {
    CAPTURE(name);
    auto doc = testing::load(name);
    auto again = parse_document(serialize(doc));
    CHECK(again == doc);
    CHECK(serialize(again) == serialize(doc));
  }
}

TEST_CASE("fixture repairs are reported") {
  auto a = parse(read_file(testing::fixture_path("basecol_co_he.xml")));
  CHECK(a.diagnostics.recovered);
  REQUIRE(a.diagnostics.warnings.size() == 1);
  CHECK(a.diagnostics.warnings[0].location.line == 231);

  auto b = parse(read_file(testing::fixture_path("cdms_co.xml")));
  CHECK(b.diagnostics.recovered);
  REQUIRE(b.diagnostics.warnings.size() == 1);
  CHECK(b.diagnostics.warnings[0].location.line == 142);

  auto c = parse(read_file(testing::fixture_path("merged_co_he.xml")));
  CHECK(c.diagnostics.warnings.size() == 2);
}

TEST_CASE("repaired text keeps its literal content") {
  auto a = testing::load("basecol_co_he.xml");
  REQUIRE(a.sources.size() == 2);
  REQUIRE(a.sources[1].uri);
  CHECK(a.sources[1].uri->find("&db_key=PHY") != std::string::npos);
}

TEST_CASE("BASECOL document content") {
  auto a = testing::load("basecol_co_he.xml");
  REQUIRE(a.origins.size() == 1);
  const auto& o = a.origins[0];
  CHECK(o.kind == OriginKind::Node);
  CHECK(o.timestamp.text == "2015-12-03T14:40:21+01:00");
  REQUIRE(o.versions.size() == 1);
  CHECK(o.versions[0].version_id == "VER001");
  CHECK(o.versions[0].species_refs == std::vector<std::string>{"XBAS2", "XBAS52"});
  CHECK(o.origin_identifier == "ivo://vamdc/basecol/vamdc-tap_12.07");
  REQUIRE(a.atoms.size() == 1);
  CHECK(a.atoms[0].element_symbol == "He");
  REQUIRE(a.atoms[0].states.size() == 1);
  REQUIRE(a.atoms[0].states[0].term);
  CHECK(a.atoms[0].states[0].term->l_symbol == "L");
  REQUIRE(a.molecules.size() == 1);
  CHECK(find_quantum_number(a.molecules[0].states[1].quantum_numbers, "J") == "1");
  REQUIRE(a.collisions.size() == 1);
  const auto& ds = a.collisions[0].datasets.at(0);
  CHECK(ds.x_values.size() == 10);
  CHECK(ds.y_values.front() == "3.4E-11");
  CHECK(a.sources[0].is_self_reference());
  CHECK_FALSE(a.sources[1].is_self_reference());
}

TEST_CASE("CDMS document keeps decimal spelling and the auxiliary flag") {
  auto b = testing::load("cdms_co.xml");
  const auto& t = b.radiative.at(0);
  CHECK(t.frequency->value.text == "115271.2021");
  CHECK(t.frequency->units == "MHz");
  CHECK(t.probability_a->value.text == "7.20360334988e-08");
  const auto& states = b.molecules.at(0).states;
  CHECK(states.at(0).auxiliary);
  CHECK(states.at(0).state_id == "SCDMS-origin-83");
  CHECK(b.molecules[0].partition_function->temperatures.size() ==
        b.molecules[0].partition_function->values.size());
  CHECK(b.sources.at(1).authors.at(0) == "M\xE9\xBB\xAEler, H. S. P.");
}

TEST_CASE("merged document nests two node origins under an Other origin") {
  auto c = testing::load("merged_co_he.xml");
  REQUIRE(c.origins.size() == 1);
  CHECK(c.origins[0].kind == OriginKind::Other);
  CHECK_FALSE(c.origins[0].origin_identifier);
  REQUIRE(c.origins[0].sub_origins.size() == 2);
  CHECK(c.origins[0].sub_origins[0].name == "CDMS database");
  CHECK(origin_tree_depth(c.origins) == 2);
  CHECK(c.comments == "Data merged by SPECTCOL.");
}

TEST_CASE("malformed documents are rejected with a specific code") {
  expect_code("<Other/>", ErrorCode::XmlSyntax);
  expect_code(std::string(kHeader) + "<Species>", ErrorCode::XmlSyntax);
  expect_code(std::string(kHeader) +
                  R"(<Origin xsi:type="Mystery"><Timestamp>2015-01-01T00:00:00Z</Timestamp></Origin></XSAMSData>)",
              ErrorCode::UnknownOriginKind);
  expect_code(std::string(kHeader) +
                  R"(<Origin xsi:type="VamdcNodeOriginType"><Timestamp>2015-01-01T00:00:00Z</Timestamp>)"
                  R"(<Version versionID="V" timestamp="2015-01-01T00:00:00Z"/>)"
                  R"(<HomepageUrl>h</HomepageUrl><Name>n</Name></Origin></XSAMSData>)",
              ErrorCode::MissingRequiredField);
}

TEST_CASE("an in-memory document gets default namespace declarations") {
  XsamsDocument doc;
  auto text = serialize(doc);
  CHECK(text.find(R"(xmlns="http://vamdc.org/xml/xsams/1.0")") != std::string::npos);
  CHECK(parse_document(text) == parse_document(serialize(parse_document(text))));
}

TEST_CASE("golden digests") {
  // Frozen values; cross-checked against an independent SHA-256 of the
  // canonical text.
  CHECK(canonical_digest(testing::load("basecol_co_he.xml")) ==
        "b3c26565bf0ab51c250d93dcb43be4cae068c8349776b75400567d32dda7f947");
  CHECK(canonical_digest(testing::load("cdms_co.xml")) ==
        "92bb8cea0f13475aa9831eb2c44d5ae40480f51867f8402f82748f2ed0165a3e");
  CHECK(canonical_digest(testing::load("merged_co_he.xml")) ==
        "7891065b72d2b330e988405aebf5171c9d46ecd49afaf292dae4ae15c56a2f0b");
}

TEST_CASE("digest ignores extraction timestamps and self-reference dates") {
  for (const char* name : {"basecol_co_he.xml", "cdms_co.xml", "merged_co_he.xml"}) {
    CAPTURE(name);
    auto doc = testing::load(name);
    auto before = canonical_digest(doc);
    for_each_origin(doc.origins, [](Origin& o) { o.timestamp.text = "2031-01-01T00:00:00Z"; });
    for (auto& s : doc.sources) {
      if (s.is_self_reference()) {
        s.production_date = "2031-01-01";
        s.year = "2031";
      }
    }
    CHECK(canonical_digest(doc) == before);
  }
}

TEST_CASE("digest changes with any version membership edit") {
  auto doc = testing::load("basecol_co_he.xml");
  auto base = canonical_digest(doc);
  auto& v = doc.origins[0].versions[0];
  auto copy = doc;
  copy.origins[0].versions[0].state_refs.pop_back();
  CHECK(canonical_digest(copy) != base);
  copy = doc;
  copy.origins[0].versions[0].source_refs.push_back("BEXTRA");
  CHECK(canonical_digest(copy) != base);
  copy = doc;
  copy.origins[0].versions[0].timestamp.text = "2015-09-02T08:10:12+01:00";
  CHECK(canonical_digest(copy) != base);
  CHECK(v.version_id == "VER001");
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "xsams/bibtex.hpp"

using namespace xsams;

namespace {

std::size_t count_entries(const std::string& text) {
  std::size_t n = 0;
  for (auto pos = text.find('@'); pos != std::string::npos; pos = text.find('@', pos + 1)) {
    if (pos == 0 || text[pos - 1] == '\n') ++n;
  }
  return n;
}

std::string field(const bibtex::BibEntry& e, std::string_view name) {
  const auto* v = e.field(name);
  return v ? *v : "<missing>";
}

}  // namespace

TEST_CASE("entry counts") {
  CHECK(count_entries(bibtex::doc_to_bibtex(testing::load("basecol_co_he.xml"))) == 2);
  CHECK(count_entries(bibtex::doc_to_bibtex(testing::load("cdms_co.xml"))) == 3);
  CHECK(count_entries(bibtex::doc_to_bibtex(testing::load("merged_co_he.xml"))) == 5);
  bibtex::Options no_self;
  no_self.include_self_references = false;
  CHECK(count_entries(bibtex::doc_to_bibtex(testing::load("merged_co_he.xml"), no_self)) == 3);
}

TEST_CASE("BBAS849") {
  auto doc = testing::load("basecol_co_he.xml");
  auto e = bibtex::to_entry(doc.sources.at(1));
  CHECK(e.kind == bibtex::EntryKind::Article);
  CHECK(e.key == "Balakrishnan2002BBAS849");
  CHECK(field(e, "year") == "2002");
  CHECK(field(e, "volume") == "571");
  CHECK(field(e, "pages") == "1015--1020");
  CHECK(field(e, "author") ==
        "Balakrishnan, N. and Dalgarno, A. and Cecchi-Pestellini, C. and Bodo, E.");
  auto text = bibtex::render(e);
  CHECK(text.rfind("@article{Balakrishnan2002BBAS849,\n", 0) == 0);
  CHECK(text.find("  pages = {1015--1020}") != std::string::npos);
  CHECK(text.back() == '\n');
}

TEST_CASE("self reference becomes a misc entry") {
  auto doc = testing::load("basecol_co_he.xml");
  auto e = bibtex::to_entry(doc.sources.at(0));
  CHECK(e.kind == bibtex::EntryKind::Misc);
  CHECK(field(e, "howpublished") == "http://basecol.obspm.fr");
  CHECK(field(e, "title") == "BASECOL database");
  CHECK(field(e, "note").find("Produced 2015-12-03") != std::string::npos);
}

TEST_CASE("name inversion") {
  CHECK(bibtex::invert_name("N. Balakrishnan") == "Balakrishnan, N.");
  CHECK(bibtex::invert_name("M.-L. Dubernet") == "Dubernet, M.-L.");
  CHECK(bibtex::invert_name("Plato") == "Plato");
  CHECK(bibtex::invert_name("Smith, J.") == "Smith, J.");
}

TEST_CASE("duplicate sources collapse") {
  auto doc = testing::load("cdms_co.xml");
  doc.sources.push_back(doc.sources[1]);
  CHECK(bibtex::sources_of(doc).size() == 3);
}

TEST_CASE("braces in values stay balanced") {
  Source s;
  s.source_id = "B1";
  s.category = "journal";
  s.year = "1999";
  s.authors = {"A. Person"};
  s.title = "On {unbalanced braces";
  auto text = bibtex::to_bibtex(s);
  CHECK(text.find("title = {On \\{unbalanced braces}") != std::string::npos);
}

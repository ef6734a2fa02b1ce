#pragma once

#include <string>

#include "xsams/io.hpp"

namespace testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(XSAMS_FIXTURES) + "/" + name;
}

inline xsams::XsamsDocument load(const std::string& name) {
  return xsams::parse_document(xsams::read_file(fixture_path(name)));
}

inline std::string node_path(const std::string& name) { return fixture_path("nodes/" + name); }

}  // namespace testing

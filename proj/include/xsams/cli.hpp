#pragma once

#include <iosfwd>

namespace xsams::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitNoInput = 66;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xsams::cli

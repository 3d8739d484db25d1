#pragma once

#include <iosfwd>

namespace npc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDomain = 3;

// Runs one subcommand. Results go to `out` unless --out names a file.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace npc::cli

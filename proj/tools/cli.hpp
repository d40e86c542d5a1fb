#pragma once

#include <iosfwd>

namespace scatteropt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitRuntime = 4;

/// Entry point of the `scatteropt` command; output goes to the given streams
/// so tests can run it in-process.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scatteropt

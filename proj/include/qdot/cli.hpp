#pragma once

#include <iosfwd>

namespace qdot {

inline constexpr int kExitUsage = 64;

/// Entry point of the `qdot` tool; returns the process exit code.
/// Subcommands: resources, channel, teleport, qec, simulate.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qdot

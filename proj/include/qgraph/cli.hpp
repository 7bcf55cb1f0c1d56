#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qgraph::cli {

inline constexpr int kExitIsospectral = 0;
inline constexpr int kExitNotIsospectral = 1;
inline constexpr int kExitUnsupported = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitDomain = 65;

/// Runs one subcommand. `args` excludes the program name. The payload goes
/// to `out`; usage messages and diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qgraph::cli

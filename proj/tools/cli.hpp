#pragma once

#include <string>
#include <vector>

namespace actionswitch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// args[0] is the program name. Writes results to files or stdout and
// diagnostics to stderr; returns the process exit status.
int run(const std::vector<std::string>& args);

}  // namespace actionswitch::cli

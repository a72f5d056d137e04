#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace deltakit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // a mathematical check was falsified
inline constexpr int kExitUsage = 2;        // bad arguments, caps, unreadable input

// Runs one command. `args` excludes the program name. Data goes to `out`
// unless --out names a file; diagnostics and summaries go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace deltakit::cli

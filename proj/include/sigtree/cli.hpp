#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sigtree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNotConverged = 3;

/// Runs one command. `args` excludes the program name. Machine-readable output
/// goes to `out` (or --out), the human summary to `err`. `in` backs "-" inputs.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace sigtree::cli

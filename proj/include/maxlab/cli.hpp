#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace maxlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // invariant or baseline failure
inline constexpr int kExitUsage = 2;        // bad flags, unreadable or malformed input, violated preconditions

/// Runs one command line (without the program name). Files named by flags are
/// written once, after all computation succeeded.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads `key=value` lines ('#' comments, blank lines allowed) and appends
/// `--key=value` for every key not already given as a flag. A value of "true"
/// appends a bare `--key`; "false" appends nothing.
std::vector<std::string> merge_config(const std::vector<std::string>& args, const std::string& config_text);

} // namespace maxlab::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cascadekit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line (args[0] is the program name). Data goes only to the
// files named by --out ("-" for `out`); diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

// Reads `key=value` lines (# comments, blank lines allowed) into
// `--key value` tokens.
std::vector<std::string> config_tokens(const std::string& path);

}  // namespace cascadekit::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dairstega::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitProvider = 3;
inline constexpr int kExitCodec = 4;

// Runs one command line (without the program name) and returns the exit code.
// Subcommands: train, embed, extract, validate, bench.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dairstega::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace regcomp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one subcommand; args exclude the program name. CSV goes to --out or `out`.
int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace regcomp::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qst::cli {

/// Exit codes of the front end.
inline constexpr int kSuccess = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

/// Parses `args` (without the program name) and runs the chosen subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace qst::cli

#ifndef FORBEARANCE_CLI_HPP
#define FORBEARANCE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace forbearance::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable consulted for the default --seed.
inline constexpr const char* kSeedEnv = "FORBEARANCE_SEED";

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Six significant digits; integral values keep a trailing ".0".
std::string format_number(double v);

}  // namespace forbearance::cli

#endif  // FORBEARANCE_CLI_HPP

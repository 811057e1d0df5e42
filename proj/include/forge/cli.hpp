#ifndef FORGE_CLI_HPP
#define FORGE_CLI_HPP

// Command-line front end. Exit codes: 0 ok, 1 malformed input or unknown
// flags, 2 precondition violated, 3 budget exhausted (best effort emitted).

#include <iosfwd>
#include <string>
#include <vector>

namespace forge::cli {

inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kPrecondition = 2;
inline constexpr int kBudgetExhausted = 3;

/// Runs one invocation; argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

/// Names of all subcommands, in help order.
const std::vector<std::string>& subcommands();

}  // namespace forge::cli

#endif  // FORGE_CLI_HPP

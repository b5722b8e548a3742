#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tailmax {

namespace exit_code {
inline constexpr int kSuccess = 0;
inline constexpr int kEstimationFailure = 1;
inline constexpr int kUsage = 2;
}  // namespace exit_code

/// Entry point of the `tailmax` tool. `args` excludes the program name.
/// Subcommands: fit, simulate, analyze, hill, oracle.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tailmax

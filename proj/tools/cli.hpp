#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace clipseek::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;

/// Runs the command line `args` (args[0] is the program name) and returns
/// the exit code. Results go to `out`, progress and timings to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace clipseek::cli

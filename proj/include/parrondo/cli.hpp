#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace parrondo::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNoResult = 3;

/// Runs the command line `args` (without the program name). Results go to
/// `out` unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace parrondo::cli

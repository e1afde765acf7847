#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace omtk {

/// Exit codes: 0 success, 1 domain error (any toolkit error, failed check or
/// verification), 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace omtk

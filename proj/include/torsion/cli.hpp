#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace torsion::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;

/// Runs one command; `args` excludes the program name. The report goes to
/// `out` (or to --out), diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace torsion::cli

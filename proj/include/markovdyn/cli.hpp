#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace markovdyn::cli {

// Exit codes: 0 success/pass, 1 check failure, 2 usage or input error,
// 3 statistically inconclusive check.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInconclusive = 3;

// Runs one CLI invocation; args excludes the program name. Reports go to
// `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace markovdyn::cli

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pwcalc::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_input = 2,
    exit_numeric = 3,
    exit_extended = 4,
};

struct Environment {
    std::optional<std::string> tol_zero;  // PWCALC_TOL_ZERO
};

Environment environment_from_process();

/// Runs one command line (without the program name). The report goes to
/// `out` unless --out names a file; help text also goes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, const Environment& env = {});

} // namespace pwcalc::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rdc::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kInfeasible = 2,  // also: a validation check failed
};

/// Runs `rdc <args...>`; args excludes the program name. Errors are reported
/// on `err` as a single line "error: <kind>: <message>".
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

/// Parses "v1,v2,..." or "start:stop:step" (inclusive). Throws InputError.
std::vector<double> parse_grid(const std::string& text);

}  // namespace rdc::cli

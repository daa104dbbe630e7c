#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mapruin {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitComputation = 1, kExitValidation = 2 };

/// Runs one CLI invocation. `args` excludes the program name. Results go to
/// `out` (or the --out file), single-line `ERROR:<code>:` diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

}  // namespace mapruin

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dppgeo::cli {

/// Runs the command line `args` (args[0] is the program name). Returns the
/// exit code: 0 on success, 1 on validation, domain or I/O failure (an error
/// JSON object is written to `err`), 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dppgeo::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace depsrl::cli {

// Runs one `depsrl` invocation. `args` excludes the program name. Data goes
// to `out` (when no --output is given), reports and progress to `err`.
// Returns the process exit code: 0 on success, 1 on a fatal error, 2 on a
// usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace depsrl::cli

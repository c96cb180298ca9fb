#pragma once

#include <string>
#include <vector>

namespace cogdist {

/// Runs one subcommand. `args` excludes the program name. Returns the
/// process exit code: 0 success, 1 pipeline failure, 2 usage error.
int run_cli(const std::vector<std::string>& args);

}  // namespace cogdist

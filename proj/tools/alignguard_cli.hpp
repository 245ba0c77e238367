#pragma once

#include <string>
#include <vector>

namespace alignguard::cli {

// Runs the CLI with argv-style arguments (excluding the program name is
// fine; both forms are accepted). Returns the process exit code:
// 0 success, 1 usage/config error, 2 stage failure, 3 infra failure.
int run(const std::vector<std::string>& args);

}  // namespace alignguard::cli

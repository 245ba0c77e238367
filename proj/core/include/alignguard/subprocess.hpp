#pragma once

#include <string>
#include <vector>

namespace alignguard {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  bool signaled = false;
  int term_signal = 0;
  std::string out;
  std::string err;
  double wall_seconds = 0.0;
};

struct ProcessOptions {
  std::vector<std::string> argv;  // argv[0] = executable, resolved via PATH
  std::string stdin_data;
  double timeout_seconds = 0.0;  // 0 = no limit
  size_t max_output_bytes = 64 * 1024 * 1024;
  std::vector<std::pair<std::string, std::string>> extra_env;
};

// Spawn a child in its own process group, feed stdin, capture both output
// streams, and kill the whole group on timeout. Throws InfraError on spawn
// failure; a timeout is reported via the result, not an exception.
ProcessResult run_process(const ProcessOptions& opts);

}  // namespace alignguard

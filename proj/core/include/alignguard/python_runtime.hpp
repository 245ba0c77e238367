#pragma once

#include <filesystem>
#include <string>

#include "alignguard/util.hpp"

namespace alignguard {

// Materializes the embedded python runtime (worker, tensor stub, ast
// bridge) into a temp directory once per process and cleans it up on exit.
class PythonRuntime {
 public:
  static const PythonRuntime& instance();

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path worker_script() const { return dir_ / "worker.py"; }
  std::filesystem::path bridge_script() const { return dir_ / "ast_bridge.py"; }
  const std::string& python_exe() const { return python_; }

  // True when a python3 interpreter answers on PATH.
  static bool python_available();

  PythonRuntime(const PythonRuntime&) = delete;
  PythonRuntime& operator=(const PythonRuntime&) = delete;

 private:
  PythonRuntime();
  ~PythonRuntime();

  std::filesystem::path dir_;
  std::string python_ = "python3";
};

// One request/response round trip against the ast bridge.
Json bridge_call(const Json& request, double timeout_seconds = 30.0);

}  // namespace alignguard

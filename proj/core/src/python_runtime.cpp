#include "alignguard/python_runtime.hpp"

#include <unistd.h>

#include <cstdlib>

#include "alignguard/json.hpp"

#include "alignguard/errors.hpp"
#include "alignguard/subprocess.hpp"

namespace alignguard {

namespace fs = std::filesystem;

namespace embedded {
extern const char* const kTensorlitePy;
extern const char* const kWorkerPy;
extern const char* const kAstBridgePy;
}  // namespace embedded

PythonRuntime::PythonRuntime() {
  if (const char* env = std::getenv("ALIGNGUARD_PYTHON")) python_ = env;
  fs::path base = fs::temp_directory_path();
  std::string tmpl = (base / "alignguard-rt-XXXXXX").string();
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  if (!::mkdtemp(buf.data())) throw InfraError("mkdtemp failed for python runtime");
  dir_ = fs::path(buf.data());
  atomic_write_file(dir_ / "tensorlite.py", embedded::kTensorlitePy);
  atomic_write_file(dir_ / "worker.py", embedded::kWorkerPy);
  atomic_write_file(dir_ / "ast_bridge.py", embedded::kAstBridgePy);
}

PythonRuntime::~PythonRuntime() {
  std::error_code ec;
  fs::remove_all(dir_, ec);
}

const PythonRuntime& PythonRuntime::instance() {
  static PythonRuntime runtime;
  return runtime;
}

bool PythonRuntime::python_available() {
  static int cached = -1;
  if (cached < 0) {
    try {
      ProcessOptions opts;
      opts.argv = {instance().python_exe(), "-c", "print(1)"};
      opts.timeout_seconds = 20.0;
      auto res = run_process(opts);
      cached = (res.exit_code == 0) ? 1 : 0;
    } catch (const Error&) {
      cached = 0;
    }
  }
  return cached == 1;
}

Json bridge_call(const Json& request, double timeout_seconds) {
  const auto& rt = PythonRuntime::instance();
  ProcessOptions opts;
  opts.argv = {rt.python_exe(), rt.bridge_script().string()};
  opts.stdin_data = request.dump();
  opts.timeout_seconds = timeout_seconds;
  auto res = run_process(opts);
  if (res.timed_out) throw InfraError("ast bridge timed out");
  if (res.exit_code != 0)
    throw InfraError("ast bridge failed (exit " + std::to_string(res.exit_code) +
                     "): " + res.err.substr(0, 2000));
  Json doc = Json::parse(res.out, nullptr, false);
  if (doc.is_discarded())
    throw InfraError("ast bridge returned malformed JSON: " + res.out.substr(0, 500));
  return doc;
}

}  // namespace alignguard

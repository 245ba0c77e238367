#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alignguard/backend.hpp"
#include "alignguard/compare.hpp"
#include "alignguard/test_case.hpp"

namespace alignguard {

enum class ExecutionStatus {
  Pass,
  NumericMismatch,
  Crash,
  Timeout,
  InvalidTest,
  Flaky,
};

std::string to_string(ExecutionStatus s);

struct MismatchInfo {
  double max_abs_diff = 0.0;
  double max_rel_diff = 0.0;
  std::string first_mismatch_path;
  std::int64_t first_mismatch_flat_index = -1;
  int iteration_index = 0;  // 1-based; 0 when not applicable
  std::string dtype;
  std::string reason;
  double reference_value = 0.0;
  double subject_value = 0.0;
};

struct IterationOutcome {
  int index = 0;  // 1-based
  bool compared_in_worker = false;
  ComparisonResult comparison;
  // Payloads are kept for triage/report rendering when transported inline.
  std::optional<Value> reference;
  std::optional<Value> subject;
};

struct ExecutionResult {
  std::string test_id;
  std::string backend_id;
  ExecutionStatus status = ExecutionStatus::Pass;
  std::optional<MismatchInfo> mismatch;
  std::vector<IterationOutcome> iterations;
  std::vector<std::string> defects_fired;  // simulator backends only
  std::string captured_stdout;
  std::string captured_stderr;
  std::string traceback;
  std::string failure_phase;
  double wall_time_seconds = 0.0;

  Json to_json() const;
  static ExecutionResult from_json(const Json& doc);
};

struct RunOptions {
  double timeout_seconds = 120.0;
  size_t inline_limit_bytes = 1 << 20;
  bool rerun_on_mismatch = true;  // flaky policy: one rerun, disagreement = flaky
};

// Fresh isolated worker per execution; reference (eager) and subject
// (compiled or simulator-distorted) runs on identical inputs, compared via
// compare_tensors. A stable mismatch requires agreement with one immediate
// rerun; disagreement yields status Flaky.
ExecutionResult run_test(const TestCase& tc, const ExecutionBackend& backend,
                         const ToleranceSpec& tol, const RunOptions& opts = {});

// run_test restricted to repeated-execution pipelines (repeat_count >= 2).
ExecutionResult run_repeated(const TestCase& tc, const ExecutionBackend& backend,
                             const ToleranceSpec& tol, const RunOptions& opts = {});

// One worker round trip. Returns the raw result document; timeouts are
// reported as {"status": "timeout"}. Throws InfraError on spawn failure or
// a malformed result document.
Json execute_in_sandbox(const Json& payload, double timeout_seconds);

// Worker request document for a case/backend pair.
Json build_worker_payload(const TestCase& tc, const ExecutionBackend& backend,
                          const ToleranceSpec& tol, size_t inline_limit_bytes);

// True when the real framework imports inside the worker environment.
bool real_framework_available();
std::string real_framework_version();

}  // namespace alignguard

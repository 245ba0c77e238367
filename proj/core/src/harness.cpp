#include "alignguard/harness.hpp"

#include "alignguard/json.hpp"

#include "alignguard/errors.hpp"
#include "alignguard/python_runtime.hpp"
#include "alignguard/subprocess.hpp"

namespace alignguard {

std::string to_string(ExecutionStatus s) {
  switch (s) {
    case ExecutionStatus::Pass:
      return "pass";
    case ExecutionStatus::NumericMismatch:
      return "numeric_mismatch";
    case ExecutionStatus::Crash:
      return "crash";
    case ExecutionStatus::Timeout:
      return "timeout";
    case ExecutionStatus::InvalidTest:
      return "invalid_test";
    case ExecutionStatus::Flaky:
      return "flaky";
  }
  throw std::logic_error("unknown ExecutionStatus");
}

namespace {

ExecutionStatus status_from_string(const std::string& s) {
  if (s == "pass") return ExecutionStatus::Pass;
  if (s == "numeric_mismatch") return ExecutionStatus::NumericMismatch;
  if (s == "crash") return ExecutionStatus::Crash;
  if (s == "timeout") return ExecutionStatus::Timeout;
  if (s == "invalid_test") return ExecutionStatus::InvalidTest;
  if (s == "flaky") return ExecutionStatus::Flaky;
  throw FormatError("unknown execution status: " + s);
}

}  // namespace

Json ExecutionResult::to_json() const {
  Json doc;
  doc["test_id"] = test_id;
  doc["backend_id"] = backend_id;
  doc["status"] = to_string(status);
  if (mismatch) {
    doc["mismatch"] = {
        {"max_abs_diff", mismatch->max_abs_diff},
        {"max_rel_diff", mismatch->max_rel_diff},
        {"first_mismatch_path", mismatch->first_mismatch_path},
        {"first_mismatch_flat_index", mismatch->first_mismatch_flat_index},
        {"iteration_index", mismatch->iteration_index},
        {"dtype", mismatch->dtype},
        {"reason", mismatch->reason},
        {"reference_value", mismatch->reference_value},
        {"subject_value", mismatch->subject_value},
    };
  } else {
    doc["mismatch"] = nullptr;
  }
  Json iters = Json::array();
  for (const auto& it : iterations) {
    Json e;
    e["index"] = it.index;
    e["equal"] = it.comparison.equal;
    if (it.reference) e["reference"] = encode_value(*it.reference);
    if (it.subject) e["subject"] = encode_value(*it.subject);
    iters.push_back(e);
  }
  doc["iterations"] = iters;
  doc["defects_fired"] = defects_fired;
  doc["captured_stdout"] = captured_stdout;
  doc["captured_stderr"] = captured_stderr;
  doc["traceback"] = traceback;
  doc["failure_phase"] = failure_phase;
  doc["wall_time_seconds"] = wall_time_seconds;
  return doc;
}

ExecutionResult ExecutionResult::from_json(const Json& doc) {
  ExecutionResult res;
  res.test_id = doc.value("test_id", "");
  res.backend_id = doc.value("backend_id", "");
  res.status = status_from_string(doc.value("status", "pass"));
  if (doc.contains("mismatch") && !doc["mismatch"].is_null()) {
    const auto& m = doc["mismatch"];
    MismatchInfo info;
    info.max_abs_diff = m.value("max_abs_diff", 0.0);
    info.max_rel_diff = m.value("max_rel_diff", 0.0);
    info.first_mismatch_path = m.value("first_mismatch_path", "");
    info.first_mismatch_flat_index = m.value("first_mismatch_flat_index", -1);
    info.iteration_index = m.value("iteration_index", 0);
    info.dtype = m.value("dtype", "");
    info.reason = m.value("reason", "");
    info.reference_value = m.value("reference_value", 0.0);
    info.subject_value = m.value("subject_value", 0.0);
    res.mismatch = info;
  }
  if (doc.contains("iterations")) {
    for (const auto& e : doc["iterations"]) {
      IterationOutcome it;
      it.index = e.value("index", 0);
      it.comparison.equal = e.value("equal", true);
      if (e.contains("reference")) it.reference = decode_value(e["reference"]);
      if (e.contains("subject")) it.subject = decode_value(e["subject"]);
      res.iterations.push_back(std::move(it));
    }
  }
  if (doc.contains("defects_fired"))
    res.defects_fired = doc["defects_fired"].get<std::vector<std::string>>();
  res.captured_stdout = doc.value("captured_stdout", "");
  res.captured_stderr = doc.value("captured_stderr", "");
  res.traceback = doc.value("traceback", "");
  res.failure_phase = doc.value("failure_phase", "");
  res.wall_time_seconds = doc.value("wall_time_seconds", 0.0);
  return res;
}

Json build_worker_payload(const TestCase& tc, const ExecutionBackend& backend,
                          const ToleranceSpec& tol, size_t inline_limit_bytes) {
  const ToleranceSpec& effective =
      tc.pipeline.tolerance_override ? *tc.pipeline.tolerance_override : tol;
  Json payload;
  payload["protocol"] = 1;
  payload["action"] = "run_case";
  payload["backend"] = backend.worker_config();
  Json test;
  test["model_source"] = tc.model_source;
  test["input_spec"] = tc.input_spec;
  test["compile_args"] = tc.compile_args;
  Json pipeline;
  pipeline["kind"] = to_string(tc.pipeline.kind);
  if (tc.pipeline.kind == PipelineSpec::Kind::RepeatedExecution) {
    pipeline["repeat_count"] = tc.pipeline.repeat_count;
    if (!tc.pipeline.state_mutation_hook.empty())
      pipeline["state_mutation_hook"] = tc.pipeline.state_mutation_hook;
  }
  if (tc.pipeline.kind == PipelineSpec::Kind::Custom)
    pipeline["custom_source"] = tc.pipeline.custom_source;
  test["pipeline"] = pipeline;
  payload["test"] = test;
  Json tols = Json::object();
  for (const auto& [dtype, pair] : effective.per_dtype)
    tols[dtype] = Json::array({pair.first, pair.second});
  payload["tolerances"] = tols;
  payload["nan_equal"] = effective.nan_equal;
  payload["inline_limit_bytes"] = inline_limit_bytes;
  return payload;
}

Json execute_in_sandbox(const Json& payload, double timeout_seconds) {
  const auto& rt = PythonRuntime::instance();
  ProcessOptions opts;
  opts.argv = {rt.python_exe(), rt.worker_script().string()};
  opts.stdin_data = payload.dump();
  opts.timeout_seconds = timeout_seconds;
  ProcessResult proc = run_process(opts);
  if (proc.timed_out) {
    Json doc;
    doc["status"] = "timeout";
    doc["wall_seconds"] = proc.wall_seconds;
    return doc;
  }
  if (proc.exit_code != 0) {
    throw InfraError("worker exited with code " + std::to_string(proc.exit_code) +
                     ": " + proc.err.substr(0, 2000));
  }
  // The result document is the last non-empty line of stdout.
  auto lines = split_lines(proc.out);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    if (trim(*it).empty()) continue;
    Json doc = Json::parse(*it, nullptr, false);
    if (doc.is_discarded())
      throw InfraError("worker protocol violation: malformed result document");
    if (!doc.contains("status"))
      throw InfraError("worker protocol violation: result lacks status");
    doc["wall_seconds"] = proc.wall_seconds;
    return doc;
  }
  throw InfraError("worker protocol violation: empty result stream");
}

namespace {

// Single execution (no flaky policy).
ExecutionResult run_once(const TestCase& tc, const ExecutionBackend& backend,
                         const ToleranceSpec& tol, const RunOptions& opts) {
  ExecutionResult res;
  res.test_id = tc.id;
  res.backend_id = backend.id;

  Json payload = build_worker_payload(tc, backend, tol, opts.inline_limit_bytes);
  Json doc = execute_in_sandbox(payload, opts.timeout_seconds);
  res.wall_time_seconds = doc.value("wall_seconds", 0.0);

  const std::string status = doc.value("status", "crash");
  if (status == "timeout") {
    res.status = ExecutionStatus::Timeout;
    return res;
  }
  res.captured_stdout = doc.value("captured_stdout", "");
  res.captured_stderr = doc.value("captured_stderr", "");
  if (doc.contains("defects_fired"))
    res.defects_fired = doc["defects_fired"].get<std::vector<std::string>>();
  if (status == "crash" || status == "invalid_test") {
    res.status = status == "crash" ? ExecutionStatus::Crash : ExecutionStatus::InvalidTest;
    res.traceback = doc.value("traceback", "");
    res.failure_phase = doc.value("phase", "");
    return res;
  }
  if (status != "ok") throw InfraError("worker protocol violation: status " + status);

  const ToleranceSpec& effective =
      tc.pipeline.tolerance_override ? *tc.pipeline.tolerance_override : tol;

  res.status = ExecutionStatus::Pass;
  if (doc.value("compared_in_worker", false)) {
    int index = 0;
    for (const auto& wc : doc.value("worker_compare", Json::array())) {
      IterationOutcome it;
      it.index = ++index;
      it.compared_in_worker = true;
      it.comparison.equal = wc.value("equal", false);
      if (!it.comparison.equal) {
        MismatchDetail detail;
        detail.reason = wc.value("reason", "values");
        detail.path = wc.value("path", "");
        detail.dtype = wc.value("dtype", "none");
        detail.first_flat_index = wc.value("first_flat_index", -1);
        detail.max_abs_diff = wc.value("max_abs_diff", 0.0);
        detail.max_rel_diff = wc.value("max_rel_diff", 0.0);
        it.comparison.detail = detail;
      }
      res.iterations.push_back(std::move(it));
    }
  } else {
    int index = 0;
    for (const auto& entry : doc.value("iterations", Json::array())) {
      IterationOutcome it;
      it.index = ++index;
      it.reference = decode_value(entry.at("reference"));
      it.subject = decode_value(entry.at("subject"));
      it.comparison = compare_tensors(*it.reference, *it.subject, effective);
      res.iterations.push_back(std::move(it));
    }
  }

  for (const auto& it : res.iterations) {
    if (!it.comparison.equal) {
      res.status = ExecutionStatus::NumericMismatch;
      MismatchInfo info;
      const auto& d = *it.comparison.detail;
      info.max_abs_diff = d.max_abs_diff;
      info.max_rel_diff = d.max_rel_diff;
      info.first_mismatch_path = d.path;
      info.first_mismatch_flat_index = d.first_flat_index;
      info.iteration_index = it.index;
      info.dtype = d.dtype;
      info.reason = d.reason;
      info.reference_value = d.reference_value;
      info.subject_value = d.subject_value;
      res.mismatch = info;
      break;
    }
  }
  return res;
}

}  // namespace

ExecutionResult run_test(const TestCase& tc, const ExecutionBackend& backend,
                         const ToleranceSpec& tol, const RunOptions& opts) {
  ExecutionResult first = run_once(tc, backend, tol, opts);
  if (first.status != ExecutionStatus::NumericMismatch || !opts.rerun_on_mismatch)
    return first;
  ExecutionResult rerun = run_once(tc, backend, tol, opts);
  if (rerun.status != ExecutionStatus::NumericMismatch) {
    first.status = ExecutionStatus::Flaky;
    return first;
  }
  return first;
}

ExecutionResult run_repeated(const TestCase& tc, const ExecutionBackend& backend,
                             const ToleranceSpec& tol, const RunOptions& opts) {
  if (tc.pipeline.kind != PipelineSpec::Kind::RepeatedExecution)
    throw PreconditionError("run_repeated: pipeline kind must be repeated_execution");
  if (tc.pipeline.repeat_count < 2)
    throw PreconditionError("run_repeated: repeat_count must be >= 2");
  return run_test(tc, backend, tol, opts);
}

bool real_framework_available() {
  static int cached = -1;
  if (cached < 0) {
    try {
      Json payload;
      payload["protocol"] = 1;
      payload["action"] = "probe";
      payload["backend"] = {{"kind", "real_compiler"}};
      Json doc = execute_in_sandbox(payload, 120.0);
      cached = doc.value("status", "") == "ok" ? 1 : 0;
    } catch (const Error&) {
      cached = 0;
    }
  }
  return cached == 1;
}

std::string real_framework_version() {
  try {
    Json payload;
    payload["protocol"] = 1;
    payload["action"] = "probe";
    payload["backend"] = {{"kind", "real_compiler"}};
    Json doc = execute_in_sandbox(payload, 120.0);
    return doc.value("framework_version", "");
  } catch (const Error&) {
    return "";
  }
}

}  // namespace alignguard

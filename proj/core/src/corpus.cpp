#include "alignguard/corpus.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "alignguard/case_facts.hpp"
#include "alignguard/errors.hpp"
#include "alignguard/json.hpp"
#include "alignguard/python_runtime.hpp"

namespace alignguard {

namespace fs = std::filesystem;

std::vector<LintViolation> lint_determinism(const TestCase& tc,
                                            const std::vector<std::string>& extra_deny) {
  CaseFacts facts = analyze_case(tc);
  std::vector<LintViolation> out;

  auto seeded_before = [&](const LintCall& rc) {
    // Component execution order: input generation precedes forward; a seed
    // anywhere in another component counts, same-component seeds must come
    // first textually.
    for (const auto& seed : facts.seed_calls) {
      if (seed.component != rc.component) return true;
      if (seed.line < rc.line) return true;
    }
    return false;
  };

  for (const auto& rc : facts.random_calls) {
    if (!seeded_before(rc)) {
      out.push_back({"unseeded-random", rc.dotted, rc.component, rc.line});
    }
  }
  for (const auto& t : facts.time_calls) {
    out.push_back({"time-read", t.dotted, t.component, t.line});
  }
  if (!extra_deny.empty()) {
    std::set<std::string> deny(extra_deny.begin(), extra_deny.end());
    for (const auto& call : facts.calls) {
      if (deny.count(call.name) || deny.count(call.dotted)) {
        out.push_back({"denied-call", call.dotted, call.component, call.line});
      }
    }
  }
  return out;
}

Json IngestReport::to_json() const {
  Json doc;
  Json accepted = Json::array();
  for (const auto& tc : cases) {
    Json e;
    e["id"] = tc.id;
    if (tc.origin) e["file"] = tc.origin->file;
    accepted.push_back(e);
  }
  doc["accepted"] = accepted;
  Json rejected = Json::array();
  for (const auto& r : rejections) {
    rejected.push_back({{"file", r.file}, {"reason", r.reason}, {"detail", r.detail}});
  }
  doc["rejected"] = rejected;
  return doc;
}

namespace {

std::string slice_lines(const std::vector<std::string>& lines, int first, int last) {
  std::string out;
  for (int i = first; i <= last && i <= static_cast<int>(lines.size()); ++i) {
    out += lines[static_cast<size_t>(i - 1)];
    out += '\n';
  }
  return out;
}

std::string rename_identifier(const std::string& source, const std::string& from,
                              const std::string& to) {
  if (from == to) return source;
  std::regex word("\\b" + from + "\\b");
  return std::regex_replace(source, word, to);
}

bool looks_like_input_builder(const std::string& name) {
  std::string low = to_lower(name);
  if (starts_with(low, "test")) return false;
  return low.find("input") != std::string::npos || low == "gen" ||
         low.find("make_args") != std::string::npos;
}

}  // namespace

std::optional<TestCase> standardize_raw_test(const std::string& filename,
                                             const std::string& source,
                                             std::string* reason,
                                             std::string* detail) {
  auto fail = [&](const std::string& r, const std::string& d) -> std::optional<TestCase> {
    if (reason) *reason = r;
    if (detail) *detail = d;
    return std::nullopt;
  };

  if (trim(source).empty()) return fail("empty", "file has no content");

  Json req;
  req["op"] = "ingest_scan";
  req["source"] = source;
  Json scan = bridge_call(req);
  if (scan.contains("ok") && !scan.value("ok", true))
    return fail("unparseable", scan.value("error", "syntax error"));

  // Environment dependencies are rejected rather than guessed around.
  auto devices = scan.value("device_markers", std::vector<std::string>{});
  if (!devices.empty())
    return fail("environment dependency", "device marker: " + devices.front());

  const auto lines = split_lines(source);

  // Model: first top-level class deriving from the framework Module type.
  Json model_class = nullptr;
  for (const auto& cls : scan.value("classes", Json::array())) {
    bool is_module = false;
    for (const auto& base : cls.value("bases", std::vector<std::string>{})) {
      if (base == "nn.Module" || base == "torch.nn.Module" || base == "Module")
        is_module = true;
    }
    if (is_module && cls.value("has_forward", false)) {
      model_class = cls;
      break;
    }
  }
  if (model_class.is_null())
    return fail("missing component", "no Module subclass with a forward method");

  // Input builder: first top-level function that looks like one.
  Json input_fn = nullptr;
  for (const auto& fn : scan.value("functions", Json::array())) {
    if (looks_like_input_builder(fn.value("name", "")) && fn.value("returns_value", false)) {
      input_fn = fn;
      break;
    }
  }
  if (input_fn.is_null())
    return fail("missing component", "no input builder function returning a value");

  // Compilation arguments: a literal `compiler_args = {...}` assignment
  // wins; otherwise literal kwargs of the compile call; a bare
  // `@torch.compile` decorator contributes an empty map.
  bool saw_compile = false;
  bool args_from_assignment = false;
  Json compile_args = Json::object();
  for (const auto& assign : scan.value("assigns", Json::array())) {
    if (assign.value("target", "") == "compiler_args" &&
        assign.contains("value_literal") && assign["value_literal"].is_object()) {
      compile_args = assign["value_literal"];
      saw_compile = true;
      args_from_assignment = true;
    }
  }
  for (const auto& call : scan.value("calls", Json::array())) {
    std::string dotted = call.value("dotted", "");
    if (dotted == "torch.compile" || dotted == "compile") {
      saw_compile = true;
      if (!args_from_assignment) {
        for (const auto& [key, kw] : call.value("kwargs", Json::object()).items()) {
          if (kw.contains("value") && !kw["value"].is_null())
            compile_args[key] = kw["value"];
        }
      }
    }
  }
  for (const auto& fn : scan.value("functions", Json::array())) {
    for (const auto& dec : fn.value("decorators", std::vector<std::string>{})) {
      if (dec == "torch.compile") saw_compile = true;
    }
  }
  for (const auto& assign : scan.value("assigns", Json::array())) {
    std::string target = assign.value("target", "");
    if (target.find("fallback_random") != std::string::npos &&
        assign.contains("value_literal") && assign["value_literal"].is_boolean()) {
      compile_args["fallback_random"] = assign["value_literal"];
    }
  }
  if (!saw_compile)
    return fail("missing component", "no compile call or compiler_args declaration");

  // Pipeline: explicit custom pipeline > mutate_state hook / counted loop
  // (repeated execution) > close-assertion (single-run differential).
  PipelineSpec pipeline;
  bool has_assert_close = false;
  for (const auto& call : scan.value("calls", Json::array())) {
    std::string dotted = call.value("dotted", "");
    if (dotted.find("assert_close") != std::string::npos ||
        dotted.find("allclose") != std::string::npos)
      has_assert_close = true;
  }

  Json custom_fn = nullptr;
  Json hook_fn = nullptr;
  for (const auto& fn : scan.value("functions", Json::array())) {
    if (fn.value("name", "") == "pipeline") custom_fn = fn;
    if (fn.value("name", "") == "mutate_state") hook_fn = fn;
  }

  int repeat_count = 0;
  for (const auto& loop : scan.value("for_loops", Json::array())) {
    if (!loop.contains("range_n") || loop["range_n"].is_null()) continue;
    int n = loop["range_n"].get<int>();
    if (n < 2) continue;
    bool loop_runs_model = false;
    for (const auto& c : loop.value("body_calls", std::vector<std::string>{})) {
      if (c.find("model") != std::string::npos || c.find("forward") != std::string::npos ||
          c.find("compiled") != std::string::npos || c.find("reference") != std::string::npos)
        loop_runs_model = true;
    }
    if (loop_runs_model) {
      repeat_count = n;
      break;
    }
  }

  if (!custom_fn.is_null()) {
    pipeline.kind = PipelineSpec::Kind::Custom;
    pipeline.custom_source = trim(slice_lines(lines, custom_fn.value("line", 1),
                                              custom_fn.value("end_line", 1))) + "\n";
  } else if (repeat_count >= 2) {
    pipeline.kind = PipelineSpec::Kind::RepeatedExecution;
    pipeline.repeat_count = repeat_count;
    if (!hook_fn.is_null()) {
      pipeline.state_mutation_hook = trim(slice_lines(lines, hook_fn.value("line", 1),
                                                      hook_fn.value("end_line", 1))) + "\n";
    }
  } else if (has_assert_close) {
    pipeline.kind = PipelineSpec::Kind::SingleRunDifferential;
  } else {
    return fail("missing component", "no close-assertion or execution loop found");
  }

  TestCase tc;
  std::string model_name = model_class.value("name", "");
  std::string input_name = input_fn.value("name", "");
  std::string model_src = trim(slice_lines(lines, model_class.value("line", 1),
                                           model_class.value("end_line", 1))) + "\n";
  std::string input_src = trim(slice_lines(lines, input_fn.value("line", 1),
                                           input_fn.value("end_line", 1))) + "\n";
  model_src = rename_identifier(model_src, model_name, "Model");
  input_src = rename_identifier(input_src, input_name, "gen_input");
  // Cross-references inside the other components follow the rename too.
  input_src = rename_identifier(input_src, model_name, "Model");
  if (!pipeline.custom_source.empty()) {
    pipeline.custom_source = rename_identifier(pipeline.custom_source, model_name, "Model");
    pipeline.custom_source =
        rename_identifier(pipeline.custom_source, input_name, "gen_input");
  }

  tc.model_source = model_src;
  tc.input_spec = input_src;
  tc.compile_args = compile_args;
  tc.pipeline = pipeline;

  std::string test_name = model_name;
  for (const auto& fn : scan.value("functions", Json::array())) {
    if (starts_with(fn.value("name", ""), "test")) {
      test_name = fn.value("name", "");
      break;
    }
  }
  tc.origin = CaseOrigin{filename, test_name};

  auto shallow = tc.shallow_validate();
  if (!shallow.empty()) return fail("standardization failure", shallow.front());
  if (auto err = python_parse_error(tc.model_source))
    return fail("standardization failure", "model_source: " + *err);
  if (auto err = python_parse_error(tc.input_spec))
    return fail("standardization failure", "input_spec: " + *err);

  auto lint = lint_determinism(tc);
  if (!lint.empty()) {
    return fail("determinism lint", lint.front().kind + ": " + lint.front().call +
                                        " (line " + std::to_string(lint.front().line) + ")");
  }

  tc.assign_id();
  return tc;
}

IngestReport ingest_seeds(const fs::path& source) {
  std::vector<std::pair<std::string, std::string>> files;
  if (fs::is_directory(source)) {
    std::vector<fs::path> paths;
    for (const auto& entry : fs::recursive_directory_iterator(source)) {
      if (entry.is_regular_file() && entry.path().extension() == ".py")
        paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) files.emplace_back(p.filename().string(), read_file(p));
  } else if (fs::is_regular_file(source)) {
    files.emplace_back(source.filename().string(), read_file(source));
  } else {
    throw ConfigError("seed source is not readable: " + source.string());
  }

  IngestReport report;
  for (const auto& [name, content] : files) {
    if (trim(content).empty()) continue;  // vacuous load
    std::string reason, detail;
    auto tc = standardize_raw_test(name, content, &reason, &detail);
    if (tc) {
      report.cases.push_back(std::move(*tc));
    } else {
      report.rejections.push_back({name, reason, detail});
    }
  }
  return report;
}

SeedVerification verify_seed(const TestCase& tc, const ExecutionBackend& backend,
                             const ToleranceSpec& tol, const RunOptions& opts) {
  SeedVerification v;
  v.result = run_test(tc, backend, tol, opts);
  v.healthy = v.result.status == ExecutionStatus::Pass;
  return v;
}

void save_test_case(const TestCase& tc, const fs::path& path) {
  atomic_write_file(path, canonical_dump(tc.to_json()));
}

TestCase load_test_case(const fs::path& path) {
  return TestCase::from_json(load_json_file(path));
}

std::vector<TestCase> load_cases_dir(const fs::path& dir) {
  std::vector<fs::path> paths;
  if (!fs::exists(dir)) throw ConfigError("case directory missing: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<TestCase> cases;
  for (const auto& p : paths) cases.push_back(load_test_case(p));
  return cases;
}

}  // namespace alignguard

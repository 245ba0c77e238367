#include "alignguard/triage.hpp"

#include <algorithm>
#include <sstream>

#include "alignguard/case_facts.hpp"
#include "alignguard/errors.hpp"
#include "alignguard/json.hpp"

namespace alignguard {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::CorrectnessBugCandidate:
      return "correctness_bug_candidate";
    case Classification::Crash:
      return "crash";
    case Classification::Timeout:
      return "timeout";
    case Classification::InvalidTest:
      return "invalid_test";
    case Classification::Flaky:
      return "flaky";
    case Classification::Pass:
      return "pass";
  }
  throw std::logic_error("unknown Classification");
}

std::optional<Classification> classification_from_string(const std::string& s) {
  for (auto c : {Classification::CorrectnessBugCandidate, Classification::Crash,
                 Classification::Timeout, Classification::InvalidTest,
                 Classification::Flaky, Classification::Pass}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

Json Verdict::to_json() const {
  Json doc;
  doc["test_case"] = test_case.to_json();
  doc["result"] = result.to_json();
  doc["classification"] = to_string(classification);
  doc["signature"] = signature;
  doc["suspected_bug_type"] =
      suspected_bug_type ? Json(to_string(*suspected_bug_type)) : Json(nullptr);
  doc["suspected_rationale"] = suspected_rationale;
  doc["rule_family"] = rule_family ? Json(to_string(*rule_family)) : Json(nullptr);
  doc["diff"] = diff;
  return doc;
}

Verdict Verdict::from_json(const Json& doc) {
  Verdict v;
  v.test_case = TestCase::from_json(doc.at("test_case"));
  v.result = ExecutionResult::from_json(doc.at("result"));
  auto cls = classification_from_string(doc.value("classification", "pass"));
  if (!cls) throw FormatError("verdict: unknown classification");
  v.classification = *cls;
  v.signature = doc.value("signature", "");
  if (doc.contains("suspected_bug_type") && !doc["suspected_bug_type"].is_null())
    v.suspected_bug_type = bug_type_from_string(doc["suspected_bug_type"].get<std::string>());
  v.suspected_rationale = doc.value("suspected_rationale", "");
  if (doc.contains("rule_family") && !doc["rule_family"].is_null())
    v.rule_family = trigger_family_from_string(doc["rule_family"].get<std::string>());
  v.diff = doc.value("diff", "");
  return v;
}

std::string failure_signature(const TestCase& tc,
                              std::optional<TriggerFamily> rule_family,
                              const std::string& diff,
                              const MismatchInfo* mismatch) {
  std::vector<std::string> ops;
  for (const auto& line : diff_added_lines(diff)) {
    for (auto& name : called_names(line)) ops.push_back(std::move(name));
  }
  std::sort(ops.begin(), ops.end());

  std::ostringstream key;
  key << to_string(tc.pipeline.kind) << "\x1f";
  key << (rule_family ? to_string(*rule_family) : "unattributed") << "\x1f";
  for (const auto& op : ops) key << op << ",";
  key << "\x1f";
  if (mismatch) {
    key << mismatch->first_mismatch_path << "\x1f" << mismatch->dtype;
  } else {
    key << "-\x1f-";
  }
  return short_hash(key.str());
}

Verdict classify(const TestCase& tc, const ExecutionResult& result,
                 std::optional<TriggerFamily> rule_family, const std::string& diff) {
  Verdict v;
  v.test_case = tc;
  v.result = result;
  v.rule_family = rule_family;
  v.diff = diff;
  switch (result.status) {
    case ExecutionStatus::NumericMismatch:
      v.classification = Classification::CorrectnessBugCandidate;
      break;
    case ExecutionStatus::Crash:
      v.classification = Classification::Crash;
      break;
    case ExecutionStatus::Timeout:
      v.classification = Classification::Timeout;
      break;
    case ExecutionStatus::InvalidTest:
      v.classification = Classification::InvalidTest;
      break;
    case ExecutionStatus::Flaky:
      v.classification = Classification::Flaky;
      break;
    case ExecutionStatus::Pass:
      v.classification = Classification::Pass;
      break;
  }
  if (v.classification == Classification::CorrectnessBugCandidate) {
    const MismatchInfo* info = result.mismatch ? &*result.mismatch : nullptr;
    v.signature = failure_signature(tc, rule_family, diff, info);
    if (rule_family) {
      BugType suspected = Taxonomy::instance().primary_type_for_family(*rule_family);
      v.suspected_bug_type = suspected;
      std::ostringstream why;
      why << "rule family " << to_string(*rule_family) << " maps to "
          << to_string(suspected);
      if (info) why << "; mismatch at " << info->first_mismatch_path;
      v.suspected_rationale = why.str();
    }
  }
  return v;
}

std::vector<Cluster> dedup(const std::vector<Verdict>& verdicts) {
  std::map<std::string, Cluster> by_signature;
  for (const auto& v : verdicts) {
    if (v.classification != Classification::CorrectnessBugCandidate) continue;
    auto& cluster = by_signature[v.signature];
    cluster.signature = v.signature;
    cluster.members.push_back(v);
  }
  std::vector<Cluster> out;
  for (auto& [sig, cluster] : by_signature) {
    size_t best = 0;
    size_t best_len = std::string::npos;
    for (size_t i = 0; i < cluster.members.size(); ++i) {
      size_t len = render_test_file(cluster.members[i].test_case).size();
      const std::string& id = cluster.members[i].test_case.id;
      if (len < best_len ||
          (len == best_len && id < cluster.members[best].test_case.id)) {
        best = i;
        best_len = len;
      }
    }
    cluster.representative = best;
    out.push_back(std::move(cluster));
  }
  return out;
}

namespace {

struct EditCandidate {
  std::string component;  // "model" | "input"
  enum class Kind { RemoveStatement, SimplifyLiteral } kind;
  int line = 0, end_line = 0;
  int col = 0, end_col = 0;
  std::string replacement;
};

std::string apply_edit(const std::string& source, const EditCandidate& edit) {
  auto lines = split_lines(source);
  if (edit.kind == EditCandidate::Kind::RemoveStatement) {
    lines.erase(lines.begin() + (edit.line - 1), lines.begin() + edit.end_line);
  } else {
    std::string& l = lines.at(static_cast<size_t>(edit.line - 1));
    l = l.substr(0, static_cast<size_t>(edit.col)) + edit.replacement +
        l.substr(static_cast<size_t>(edit.end_col));
  }
  return join_lines(lines);
}

std::vector<EditCandidate> enumerate_edits(const CaseFacts& facts) {
  std::vector<EditCandidate> edits;
  auto add_statements = [&](const std::vector<StmtSpan>& body, const std::string& comp) {
    // Keep the return; everything else is fair game, largest spans first so
    // big wins are tried early.
    for (const auto& stmt : body) {
      if (stmt.is_return) continue;
      EditCandidate e;
      e.component = comp;
      e.kind = EditCandidate::Kind::RemoveStatement;
      e.line = stmt.line;
      e.end_line = stmt.end_line;
      edits.push_back(e);
    }
  };
  if (facts.model && facts.model->forward)
    add_statements(facts.model->forward->body, "model");
  if (facts.input_fn) add_statements(facts.input_fn->body, "input");

  for (const auto& lit : facts.literals) {
    if (lit.component != "model" && lit.component != "input") continue;
    bool trivial_int = lit.is_int && (lit.value == 0 || lit.value == 1);
    bool trivial_float = !lit.is_int && (lit.value == 0.0 || lit.value == 1.0);
    if (trivial_int || trivial_float || lit.value < 0) continue;
    EditCandidate e;
    e.component = lit.component;
    e.kind = EditCandidate::Kind::SimplifyLiteral;
    e.line = lit.line;
    e.col = lit.col;
    e.end_col = lit.end_col;
    e.replacement = lit.is_int ? "1" : "1.0";
    edits.push_back(e);
  }
  std::stable_sort(edits.begin(), edits.end(), [](const auto& a, const auto& b) {
    int spa = a.end_line - a.line, spb = b.end_line - b.line;
    return spa > spb;
  });
  return edits;
}

}  // namespace

TestCase minimize(const TestCase& tc, const ExecutionBackend& backend,
                  const ToleranceSpec& tol, const MinimizeOptions& opts) {
  ExecutionResult baseline = run_test(tc, backend, tol, opts.run);
  Verdict v0 = classify(tc, baseline, std::nullopt, "");
  if (v0.classification != Classification::CorrectnessBugCandidate)
    throw PreconditionError("minimize: input does not reproduce a candidate");
  const MismatchInfo* info0 = baseline.mismatch ? &*baseline.mismatch : nullptr;
  std::string target_signature = failure_signature(tc, std::nullopt, "", info0);

  TestCase current = tc;
  size_t current_len = render_test_file(current).size();

  auto still_reproduces = [&](const TestCase& candidate) {
    try {
      ExecutionResult res = run_test(candidate, backend, tol, opts.run);
      if (res.status != ExecutionStatus::NumericMismatch) return false;
      const MismatchInfo* info = res.mismatch ? &*res.mismatch : nullptr;
      return failure_signature(candidate, std::nullopt, "", info) == target_signature;
    } catch (const Error&) {
      return false;
    }
  };

  bool changed = true;
  int steps = 0;
  while (changed && steps < opts.max_accepted_edits) {
    changed = false;
    CaseFacts facts;
    try {
      facts = analyze_case(current);
    } catch (const Error&) {
      break;
    }
    for (const auto& edit : enumerate_edits(facts)) {
      TestCase candidate = current;
      if (edit.component == "model") {
        candidate.model_source = apply_edit(current.model_source, edit);
      } else {
        candidate.input_spec = apply_edit(current.input_spec, edit);
      }
      if (candidate.model_source == current.model_source &&
          candidate.input_spec == current.input_spec)
        continue;
      if (python_parse_error(candidate.model_source) ||
          python_parse_error(candidate.input_spec))
        continue;
      auto shallow = candidate.shallow_validate();
      if (!shallow.empty()) continue;
      candidate.assign_id();
      size_t len = render_test_file(candidate).size();
      if (len > current_len) continue;
      if (still_reproduces(candidate)) {
        current = candidate;
        current_len = len;
        changed = true;
        ++steps;
        break;  // facts are stale after any accepted edit
      }
    }
  }
  return current;
}

Json DetectionReport::to_json() const {
  Json doc;
  Json cells_doc = Json::array();
  for (const auto& c : cells) {
    cells_doc.push_back({{"test_id", c.test_id},
                         {"error_on_buggy", c.error_on_buggy},
                         {"error_on_fixed", c.error_on_fixed},
                         {"indeterminate", c.indeterminate},
                         {"detected", c.detected}});
  }
  doc["cells"] = cells_doc;
  doc["detected"] = detected;
  doc["indeterminate_count"] = indeterminate_count;
  return doc;
}

std::string DetectionReport::to_table() const {
  std::ostringstream out;
  out << "test_id           buggy  fixed  detected\n";
  for (const auto& c : cells) {
    out << c.test_id;
    for (size_t i = c.test_id.size(); i < 18; ++i) out << ' ';
    if (c.indeterminate) {
      out << "indeterminate\n";
      continue;
    }
    out << (c.error_on_buggy ? "error" : "ok   ") << "  "
        << (c.error_on_fixed ? "error" : "ok   ") << "  "
        << (c.detected ? "yes" : "no") << "\n";
  }
  out << "aggregate detected: " << (detected ? "yes" : "no")
      << " (indeterminate cells: " << indeterminate_count << ")\n";
  return out.str();
}

DetectionReport evaluate_detection(const std::vector<TestCase>& tests,
                                   const ExecutionBackend& env_buggy,
                                   const ExecutionBackend& env_fixed,
                                   const ToleranceSpec& tol, const RunOptions& opts,
                                   DetectionRunner runner) {
  DetectionRunner run = runner;
  if (!run) {
    run = [&tol, &opts](const TestCase& tc, const ExecutionBackend& backend) {
      ExecutionResult res = run_test(tc, backend, tol, opts);
      return classify(tc, res).classification;
    };
  }

  DetectionReport report;
  for (const auto& tc : tests) {
    DetectionCell cell;
    cell.test_id = tc.id;
    try {
      cell.error_on_buggy =
          run(tc, env_buggy) == Classification::CorrectnessBugCandidate;
      cell.error_on_fixed =
          run(tc, env_fixed) == Classification::CorrectnessBugCandidate;
      cell.detected = cell.error_on_buggy && !cell.error_on_fixed;
    } catch (const Error&) {
      cell.indeterminate = true;
      ++report.indeterminate_count;
    }
    if (!cell.indeterminate && cell.detected) report.detected = true;
    report.cells.push_back(cell);
  }
  return report;
}

namespace {

std::string iteration_trace(const Verdict& v, bool reference) {
  std::ostringstream out;
  out << "[";
  bool first = true;
  for (const auto& it : v.result.iterations) {
    const std::optional<Value>& payload = reference ? it.reference : it.subject;
    if (!payload) continue;
    const Value* output = nullptr;
    if (payload->kind == Value::Kind::Dict) {
      auto found = payload->fields.find("output");
      if (found != payload->fields.end()) output = &found->second;
    }
    if (!first) out << ", ";
    out << (output ? render_value(*output, 16) : render_value(*payload, 16));
    first = false;
  }
  out << "]";
  return out.str();
}

}  // namespace

std::string render_report(const Cluster& cluster) {
  if (cluster.members.empty())
    throw PreconditionError("render_report: empty cluster");
  const Verdict& rep = cluster.rep();
  std::ostringstream out;
  out << "correctness bug report " << cluster.signature << "\n";
  out << "==========================================\n";
  out << "classification: " << to_string(rep.classification) << "\n";
  out << "cluster size: " << cluster.members.size() << " (representative "
      << rep.test_case.id << ")\n";
  if (rep.suspected_bug_type) {
    out << "suspected bug type: " << to_string(*rep.suspected_bug_type);
    if (!rep.suspected_rationale.empty()) out << " -- " << rep.suspected_rationale;
    out << "\n";
  }
  out << "backend: " << rep.result.backend_id << "\n";
  out << "pipeline: " << to_string(rep.test_case.pipeline.kind);
  if (rep.test_case.pipeline.kind == PipelineSpec::Kind::RepeatedExecution)
    out << " (K=" << rep.test_case.pipeline.repeat_count << ")";
  out << "\n";
  if (rep.result.mismatch) {
    const auto& m = *rep.result.mismatch;
    out << "first divergence: iteration " << m.iteration_index << ", path "
        << (m.first_mismatch_path.empty() ? "<root>" : m.first_mismatch_path)
        << ", flat index " << m.first_mismatch_flat_index << ", dtype " << m.dtype
        << "\n";
    std::ostringstream stats;
    stats.precision(9);
    stats << "max_abs_diff=" << m.max_abs_diff << " max_rel_diff=" << m.max_rel_diff;
    out << stats.str() << "\n";
  }
  if (rep.test_case.pipeline.kind == PipelineSpec::Kind::RepeatedExecution &&
      !rep.result.iterations.empty()) {
    out << "expected (reference): " << iteration_trace(rep, true) << "\n";
    out << "actual   (subject):   " << iteration_trace(rep, false) << "\n";
  } else if (!rep.result.iterations.empty() && rep.result.mismatch) {
    size_t idx = static_cast<size_t>(rep.result.mismatch->iteration_index - 1);
    if (idx < rep.result.iterations.size()) {
      const auto& it = rep.result.iterations[idx];
      if (it.reference)
        out << "expected (reference): " << render_value(*it.reference, 64) << "\n";
      if (it.subject)
        out << "actual   (subject):   " << render_value(*it.subject, 64) << "\n";
    }
  }
  if (!rep.result.defects_fired.empty()) {
    out << "defects fired:";
    for (const auto& d : rep.result.defects_fired) out << " " << d;
    out << "\n";
  }
  out << "reproduce: alignguard run --case <case.json> --backend <backend.json>\n";
  out << "\nreproducer source\n";
  out << "-----------------\n";
  out << render_test_file(rep.test_case);
  return out.str();
}

}  // namespace alignguard

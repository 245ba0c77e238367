#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "alignguard/harness.hpp"
#include "alignguard/taxonomy.hpp"
#include "alignguard/test_case.hpp"

namespace alignguard {

// Correctness bugs are wrong outputs without exceptions, crashes, or
// warnings; only stable numeric mismatches become candidates.
enum class Classification {
  CorrectnessBugCandidate,
  Crash,
  Timeout,
  InvalidTest,
  Flaky,
  Pass,
};

std::string to_string(Classification c);
std::optional<Classification> classification_from_string(const std::string& s);

struct Verdict {
  TestCase test_case;
  ExecutionResult result;
  Classification classification = Classification::Pass;
  std::string signature;  // candidates only
  std::optional<BugType> suspected_bug_type;
  std::string suspected_rationale;
  std::optional<TriggerFamily> rule_family;
  std::string diff;  // seed -> mutant diff used for the signature op set

  Json to_json() const;
  static Verdict from_json(const Json& doc);
};

// classification follows the execution status; candidates get a dedup
// signature and a suspected bug type inferred from the rule's trigger
// family (informational only).
Verdict classify(const TestCase& tc, const ExecutionResult& result,
                 std::optional<TriggerFamily> rule_family = std::nullopt,
                 const std::string& diff = "");

// Stable signature over (pipeline kind, trigger family, op-name multiset of
// the mutated region, mismatch container path, dtype).
std::string failure_signature(const TestCase& tc,
                              std::optional<TriggerFamily> rule_family,
                              const std::string& diff,
                              const MismatchInfo* mismatch);

struct Cluster {
  std::string signature;
  std::vector<Verdict> members;
  size_t representative = 0;  // index into members: smallest rendered source

  const Verdict& rep() const { return members.at(representative); }
};

// Partition of the candidate verdicts by signature; non-candidates are not
// clustered. Clusters are ordered by signature.
std::vector<Cluster> dedup(const std::vector<Verdict>& verdicts);

struct MinimizeOptions {
  int max_accepted_edits = 64;
  RunOptions run;
};

// Greedy delta debugging over removable statements and simplifiable
// literals; every accepted step still reproduces a candidate with the same
// signature, and the result never grows.
TestCase minimize(const TestCase& tc, const ExecutionBackend& backend,
                  const ToleranceSpec& tol, const MinimizeOptions& opts = {});

struct DetectionCell {
  std::string test_id;
  bool error_on_buggy = false;
  bool error_on_fixed = false;
  bool indeterminate = false;  // infra failure on either side
  bool detected = false;       // error_on_buggy && !error_on_fixed
};

struct DetectionReport {
  std::vector<DetectionCell> cells;
  bool detected = false;  // OR over determinate cells
  size_t indeterminate_count = 0;

  Json to_json() const;
  std::string to_table() const;
};

using DetectionRunner =
    std::function<Classification(const TestCase&, const ExecutionBackend&)>;

// The detection criterion, literally: detected iff some test errors on the
// buggy environment and not on the fixed one. Infra failures mark the cell
// indeterminate and are excluded from the aggregate.
DetectionReport evaluate_detection(const std::vector<TestCase>& tests,
                                   const ExecutionBackend& env_buggy,
                                   const ExecutionBackend& env_fixed,
                                   const ToleranceSpec& tol,
                                   const RunOptions& opts = {},
                                   DetectionRunner runner = nullptr);

// Deterministic, self-contained report for one cluster.
std::string render_report(const Cluster& cluster);

}  // namespace alignguard

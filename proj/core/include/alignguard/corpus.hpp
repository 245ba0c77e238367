#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "alignguard/harness.hpp"
#include "alignguard/test_case.hpp"

namespace alignguard {

struct LintViolation {
  std::string kind;  // "unseeded-random" | "time-read" | "denied-call"
  std::string call;
  std::string component;
  int line = 0;
};

// Flags deny-listed nondeterministic constructs unless explicit seeding
// precedes them in the same test; wall-clock reads are always flagged.
std::vector<LintViolation> lint_determinism(
    const TestCase& tc, const std::vector<std::string>& extra_deny = {});

struct RejectedSeed {
  std::string file;
  std::string reason;  // short category
  std::string detail;
};

struct IngestReport {
  std::vector<TestCase> cases;
  std::vector<RejectedSeed> rejections;
  Json to_json() const;
};

// Standardize one raw test file into the four-component template.
// Returns nullopt with *reason/detail filled when the file is rejected.
std::optional<TestCase> standardize_raw_test(const std::string& filename,
                                             const std::string& source,
                                             std::string* reason,
                                             std::string* detail);

// Ingest every .py file under `source` (or the single file). Unreadable
// sources throw ConfigError; per-file problems land in the report.
IngestReport ingest_seeds(const std::filesystem::path& source);

struct SeedVerification {
  bool healthy = false;
  ExecutionResult result;
};

// healthy iff run_test reports pass at baseline; failing seeds must be
// quarantined and never mutated.
SeedVerification verify_seed(const TestCase& tc, const ExecutionBackend& backend,
                             const ToleranceSpec& tol, const RunOptions& opts = {});

void save_test_case(const TestCase& tc, const std::filesystem::path& path);
TestCase load_test_case(const std::filesystem::path& path);
std::vector<TestCase> load_cases_dir(const std::filesystem::path& dir);

}  // namespace alignguard

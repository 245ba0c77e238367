#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alignguard/llm_gateway.hpp"
#include "alignguard/rules.hpp"
#include "alignguard/test_case.hpp"

namespace alignguard {

struct ValidationVerdict {
  enum class Status {
    Valid,
    SyntaxError,
    DeterminismViolation,
    TemplateViolation,
    NoChange,
  };
  Status status = Status::Valid;
  std::string detail;
};

std::string to_string(ValidationVerdict::Status s);

struct Mutant {
  TestCase test_case;  // parent_id and applied_rule_id set
  std::string diff;    // canonical-serialization diff, seed -> mutant
  enum class Path { Llm, Builtin } path = Path::Builtin;
  ValidationVerdict validity;

  Json to_json() const;
  static Mutant from_json(const Json& doc);
};

struct MutationOutcome {
  enum class Kind { Produced, Declined } kind = Kind::Produced;
  std::optional<Mutant> mutant;
  std::string reason;  // decline reason
};

// Applies `rule` to `seed`. Builtin rules run their deterministic
// transform (variant chosen from campaign_seed, stable per rule/seed
// pair); LLM rules go through the gateway with the mutation prompt.
// Precondition: match_condition(rule, seed) is Match or Unknown and the
// seed is healthy. The returned mutant has been validated.
MutationOutcome mutate(const MutationRule& rule, const TestCase& seed,
                       std::uint64_t campaign_seed, Gateway* gateway = nullptr,
                       const std::string& issue_context = "");

// Parse check, determinism lint, template conformance, diff-nonempty, in
// that order; the first failing class wins.
ValidationVerdict validate_mutant(const TestCase& seed, const TestCase& mutant,
                                  const std::string& diff);

// The Listing-style mutation prompt for the LLM path (exposed for cassette
// tooling and tests).
CompletionRequest build_mutation_prompt(const MutationRule& rule,
                                        const TestCase& seed,
                                        const GatewayConfig& config,
                                        const std::string& issue_context);

struct BatchEntry {
  std::string rule_id;
  std::string seed_id;
  std::string event;  // "produced" | "declined" | "invalid" | "no-match" | "error"
  std::string detail;
};

struct BatchResult {
  std::vector<Mutant> mutants;  // valid mutants only, in production order
  std::vector<BatchEntry> log;
};

// Deterministically shuffled rule x seed sweep, stopping at `budget`
// valid mutants. Seeds must be pre-verified; the seed set is never
// modified.
BatchResult batch_mutate(const std::vector<MutationRule>& rules,
                         const std::vector<TestCase>& seeds, size_t budget,
                         std::uint64_t campaign_seed, Gateway* gateway = nullptr);

}  // namespace alignguard

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alignguard/case_facts.hpp"
#include "alignguard/taxonomy.hpp"
#include "alignguard/test_case.hpp"

namespace alignguard {

enum class TargetComponent {
  ModelStructure,
  InputData,
  CompilationArguments,
  TestingPipeline,
};

std::string to_string(TargetComponent c);
std::optional<TargetComponent> target_component_from_string(const std::string& s);
// Maps prompt-facing names ("Model Structure(s)", "Input Data", ...) too.
std::optional<TargetComponent> target_component_from_loose_string(const std::string& s);

// condition = when to mutate; matcher is an executable predicate for
// builtin rules (a small JSON AST over case facts), absent for LLM rules.
struct ConditionSpec {
  std::string description;
  Json matcher = Json(nullptr);
};

struct RuleProvenance {
  enum class Kind { Llm, Builtin };
  Kind kind = Kind::Builtin;
  std::string bug_id;            // llm provenance
  TriggerFamily family = TriggerFamily::AliasThenInplace;  // builtin provenance
};

struct MutationRule {
  std::string rule_id;
  TargetComponent target_component = TargetComponent::ModelStructure;
  ConditionSpec condition;
  std::string action;
  std::string example_before;
  std::string example_after;
  RuleProvenance provenance;
  // Builtin transform dispatch key and parameters (variant list, K, ...).
  std::string builtin_key;
  Json params = Json::object();

  bool is_builtin() const { return provenance.kind == RuleProvenance::Kind::Builtin; }
  std::vector<std::string> validate() const;
  Json to_json() const;
  static MutationRule from_json(const Json& doc);
};

enum class MatchResult { Match, NoMatch, Unknown };
std::string to_string(MatchResult r);

// Builtin rules answer by executing the matcher; LLM rules without a
// matcher answer Unknown (applicability deferred to the mutator).
// A matcher evaluation error degrades to Unknown with a diagnostic.
MatchResult match_condition(const MutationRule& rule, const TestCase& tc,
                            std::string* diagnostic = nullptr);
MatchResult match_condition(const MutationRule& rule, const CaseFacts& facts,
                            const TestCase& tc, std::string* diagnostic = nullptr);

// Matcher predicate evaluation (exposed for tests).
bool eval_matcher(const Json& matcher, const CaseFacts& facts, const TestCase& tc);

// The deterministic library. Covers every trigger family in the taxonomy;
// rule ids and ordering are stable across calls and processes.
std::vector<MutationRule> builtin_rules();
// Filtered view; throws ConfigError on a family with no builtin rules.
std::vector<MutationRule> builtin_rules(const std::set<TriggerFamily>& filter);

void save_rule(const MutationRule& rule, const std::filesystem::path& dir);
std::vector<MutationRule> load_rules_dir(const std::filesystem::path& dir);

}  // namespace alignguard

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>

#include "alignguard/knowledge.hpp"
#include "alignguard/llm_gateway.hpp"

namespace alignguard {

// The four mutable components of the test template, as prompt headings and
// as stable snake_case keys. The mapping is fixed.
struct ComponentKey {
  const char* snake;
  const char* title;
};
const std::array<ComponentKey, 4>& component_keys();

inline constexpr const char* kNotApplicable = "not-applicable";

// Structured extraction of a bug's trigger components.
struct TriggerPattern {
  std::string bug_id;
  // Keys: model_structures, input_features, compilation_arguments,
  // testing_pipeline. Values are free text or "not-applicable".
  std::map<std::string, std::string> components;
  std::string rationale;
  BugType bug_type = BugType::GSC;
  RootCause root_cause = RootCause::IncompleteSymbolicTracing;
  TriggerFamily trigger_family = TriggerFamily::NonComputationalOps;
  bool low_confidence = false;  // extracted from a synthetic-text record

  std::vector<std::string> validate(const BugRecord& source) const;
  Json to_json() const;
  static TriggerPattern from_json(const Json& doc);
};

// Pure prompt construction: issue text, fix diff, and the three taxonomy
// labels, verbatim-delimited, with the fixed output schema.
CompletionRequest build_extraction_prompt(const BugRecord& record,
                                          const GatewayConfig& config);

// Step 1: record -> pattern through the gateway, with schema validation
// and label passthrough.
TriggerPattern extract_pattern(const BugRecord& record, Gateway& gateway);

void save_pattern(const TriggerPattern& pattern, const std::filesystem::path& dir);
TriggerPattern load_pattern(const std::filesystem::path& dir, const std::string& bug_id);

}  // namespace alignguard

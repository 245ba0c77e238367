#pragma once

#include <string>
#include <vector>

#include "alignguard/extractor.hpp"
#include "alignguard/rules.hpp"

namespace alignguard {

// Step 2 prompt: structured pattern, issue text, fix diff, labels, the
// fixed seed template, and the condition/action/example output schema.
// Low-confidence patterns are refused unless allow_low_confidence is set.
CompletionRequest build_rule_prompt(const TriggerPattern& pattern,
                                    const BugRecord& record,
                                    const GatewayConfig& config,
                                    bool allow_low_confidence = false);

struct SynthesisOutcome {
  std::vector<MutationRule> rules;
  // rule index in completion -> reason it was dropped
  std::vector<std::pair<std::string, std::string>> dropped;
};

// Parses Rule1..RuleN from the completion; invalid rules are dropped with a
// logged reason, never silently.
SynthesisOutcome synthesize_rules(const TriggerPattern& pattern,
                                  const BugRecord& record, Gateway& gateway,
                                  bool allow_low_confidence = false);

// The fixed seed template text embedded in prompts.
std::string seed_template_text();

}  // namespace alignguard

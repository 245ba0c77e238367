#include "alignguard/synthesizer.hpp"

#include <sstream>

#include "alignguard/errors.hpp"
#include "alignguard/json.hpp"

namespace alignguard {

std::string seed_template_text() {
  return "class Model(nn.Module):\n"
         "    ...\n"
         "\n"
         "def gen_input():\n"
         "    ...\n"
         "\n"
         "def testing_pipeline(Model, gen_input, compiler_args):\n"
         "    ...\n"
         "\n"
         "compiler_args = {...}\n";
}

CompletionRequest build_rule_prompt(const TriggerPattern& pattern,
                                    const BugRecord& record,
                                    const GatewayConfig& config,
                                    bool allow_low_confidence) {
  if (pattern.low_confidence && !allow_low_confidence)
    throw ConfigError("pattern " + pattern.bug_id +
                      " is low-confidence (synthetic source text); pass the "
                      "override to synthesize from it anyway");

  std::ostringstream user;
  user << "Task: From the bug-triggering pattern below, design targeted, "
          "template-aligned mutation plans that only mutate regions inside the "
          "fixed seed template so compiled-vs-eager correctness bugs are "
          "triggered.\n\n";
  user << "Input:\n";
  user << "Structured Bug-Triggering Pattern:\n" << pattern.to_json().dump(2) << "\n\n";
  user << "Issue Report (verbatim):\n<<<ISSUE\n" << record.issue_text << "\nISSUE\n\n";
  user << "Fixing Commit (verbatim):\n<<<COMMIT\n"
       << (trim(record.fix_commit).empty() ? "unavailable" : record.fix_commit)
       << "\nCOMMIT\n\n";
  user << "Bug Type Category: " << to_string(record.bug_type) << "\n";
  user << "Root Cause Category: " << to_string(record.root_cause) << "\n";
  user << "Bug-Triggering Pattern Category: " << to_string(record.trigger_family)
       << "\n\n";
  user << "Seed Template:\n```\n" << seed_template_text() << "```\n\n";
  user << "Output (a single JSON object):\n";
  user << "{\n"
          "  \"Rule1\": {\n"
          "    \"Target Mutable Component\": \"<one of: Model Structure, Input "
          "Data, Compilation Arguments, Testing Pipeline>\",\n"
          "    \"Condition\": \"<The feature of seed code (e.g., 'if the model "
          "structure contains a view tensor')>\",\n"
          "    \"Action\": \"<Concrete mutation action(s) to be applied on this "
          "seed code>\",\n"
          "    \"Example Mutation\": \"<seed code snippet> -> <seed code snippet "
          "after mutation>\"\n"
          "  },\n"
          "  \"Rule2\": { ... }\n"
          "}\n\n";
  user << "Guidelines: For each mutable component, if applicable, design a set "
          "of mutation rules (condition -> action pairs) to induce the "
          "bug-triggering pattern on diverse seed codes that follow the fixed "
          "template.\n";
  user << "Constraints: rules must keep the template structure intact and must "
          "not rely on randomness or environment-specific devices.\n";

  CompletionRequest req;
  req.model_name = config.model_name;
  req.temperature = config.temperature;
  req.system_text =
      "You are an expert on deep-learning compiler correctness bugs. "
      "You design precise mutation rules for compiler test cases.";
  req.user_text = user.str();
  req.stage = "synthesize:" + record.issue_id;
  return req;
}

namespace {

// "before -> after"; tolerates fenced snippets and a missing arrow.
bool split_example(const std::string& text, std::string* before, std::string* after) {
  size_t arrow = text.find("->");
  if (arrow == std::string::npos) return false;
  *before = trim(text.substr(0, arrow));
  *after = trim(text.substr(arrow + 2));
  return !before->empty() && !after->empty();
}

}  // namespace

SynthesisOutcome synthesize_rules(const TriggerPattern& pattern,
                                  const BugRecord& record, Gateway& gateway,
                                  bool allow_low_confidence) {
  CompletionRequest req =
      build_rule_prompt(pattern, record, gateway.config(), allow_low_confidence);
  Json doc = gateway.complete_structured(req, {"Rule1"});

  SynthesisOutcome outcome;
  int index = 0;
  for (const auto& [key, body] : doc.items()) {
    if (key.rfind("Rule", 0) != 0) continue;
    ++index;
    std::string drop_reason;
    MutationRule rule;
    rule.provenance.kind = RuleProvenance::Kind::Llm;
    rule.provenance.bug_id = record.issue_id;

    if (!body.is_object()) {
      outcome.dropped.emplace_back(key, "rule body is not an object");
      continue;
    }
    auto target =
        target_component_from_loose_string(body.value("Target Mutable Component", ""));
    if (!target) {
      outcome.dropped.emplace_back(key, "unrecognized target component");
      continue;
    }
    rule.target_component = *target;
    rule.condition.description = body.value("Condition", "");
    rule.action = body.value("Action", "");
    std::string example = body.value("Example Mutation", "");
    if (!split_example(example, &rule.example_before, &rule.example_after)) {
      outcome.dropped.emplace_back(key, "example mutation lacks a before -> after pair");
      continue;
    }
    if (rule.example_before == rule.example_after) {
      outcome.dropped.emplace_back(key, "example_before equals example_after");
      continue;
    }
    if (trim(rule.condition.description).empty() || trim(rule.action).empty()) {
      outcome.dropped.emplace_back(key, "condition or action is empty");
      continue;
    }
    rule.rule_id =
        "llm-" + record.issue_id + "-" +
        short_hash(record.issue_id + "|" + std::to_string(index) + "|" +
                   rule.condition.description + "|" + rule.action)
            .substr(0, 8);
    auto violations = rule.validate();
    if (!violations.empty()) {
      outcome.dropped.emplace_back(key, violations.front());
      continue;
    }
    outcome.rules.push_back(std::move(rule));
  }
  return outcome;
}

}  // namespace alignguard
